//! Robust aggregation of expert forecasts on finite information structures.
//!
//! The library models a group of experts who each observe a private signal
//! about a real-valued outcome. From the joint distribution it computes
//! conditional-expectation forecasts, evaluates aggregation strategies by
//! their quadratic-loss *value*, and checks the substitutes conditions under
//! which simple aggregators carry worst-case approximation guarantees.
//!
//! Module map:
//!
//! - [`info_core`] — finite information structures, signal subsets,
//!   conditional expectations, values, and approximation ratios.
//! - [`substitutes`] — exhaustive checks for the weak, projective, and
//!   restricted-projective substitutes conditions.
//! - [`aggregators`] — averaging, extremization, prior-only, tabular, and
//!   random-expert strategies.
//! - [`guarantees`] — the closed-form and optimized approximation-ratio
//!   guarantees as functions of the expert count.
//! - [`gaussian_families`] — parametric Gaussian examples with closed-form
//!   ratios and a deterministic Monte Carlo cross-check.
//! - [`catalog`] — named reference instances (XOR, secret sharing, the tight
//!   two-expert pairs, random projective structures).
//! - [`revelation`] — the revelation-dominance check for a single expert
//!   deciding whether to share a signal.
//! - [`rng`] — the pinned pseudorandom generator behind every sampler, so
//!   seeded runs are bit-for-bit reproducible.
//! - [`repro`] — the scripted acceptance suite.
//! - [`cli`] — the `robust-agg` command-line interface.

pub mod aggregators;
pub mod catalog;
pub mod cli;
pub mod gaussian_families;
pub mod guarantees;
pub mod info_core;
pub mod repro;
pub mod revelation;
pub mod rng;
pub mod substitutes;

//! Worst-case approximation guarantees for robust aggregation.
//!
//! The positive guarantees come from a family of quadratic inequalities
//! parameterized by coefficients `(a, b)`; the closed forms here pick the
//! optimal coefficients for each number of experts `n`. The known-prior
//! guarantee additionally optimizes the extremization factor `d`, which this
//! module performs numerically (golden-section search followed by a
//! derivative-sign bisection that sharpens the maximizer to ~1e-10).
//!
//! A directly stated closed form for the known-prior guarantee disagrees
//! with the value produced by the optimization chain at small `n`; both
//! numbers are kept and reported side by side with a mismatch flag (see
//! [`known_prior_discrepancy`]) rather than silently picking one.

use serde::Serialize;
use thiserror::Error;

/// Width at which the golden-section and ternary searches stop.
const SEARCH_TOLERANCE: f64 = 1e-10;

/// Agreement threshold for the closed-form-vs-optimization comparison.
const DISCREPANCY_TOLERANCE: f64 = 1e-9;

/// Errors from guarantee-coefficient computations.
#[derive(Debug, Error, PartialEq)]
pub enum GuaranteeError {
    /// The coefficient quadratic has no real root for this `(n, d)`.
    #[error("coefficient discriminant is negative for n={n}, d={d}")]
    NegativeDiscriminant { n: u64, d: f64 },
    /// Extremization factors must lie in `(0, 2]`.
    #[error("extremization factor d={d} lies outside (0, 2]")]
    InvalidFactor { d: f64 },
}

/// Optimal prior-free inequality coefficients
/// `a = (2n - 1 + sqrt(3n² - 3n + 1)) / (2n)` and `b = (2a - 1)² / (4a)`.
///
/// # Panics
/// Panics if `n == 0`.
pub fn ab_prior_free(n: u64) -> (f64, f64) {
    assert!(n >= 1, "guarantees require at least one expert");
    let nf = n as f64;
    let a = (2.0 * nf - 1.0 + (3.0 * nf * nf - 3.0 * nf + 1.0).sqrt()) / (2.0 * nf);
    let b = (2.0 * a - 1.0).powi(2) / (4.0 * a);
    (a, b)
}

/// Worst-case approximation ratio of averaging over weak substitutes:
/// `2/n - (n-1) / (2n (2n - 1 + sqrt(3n² - 3n + 1))) - 1/n²`.
///
/// # Panics
/// Panics if `n == 0`.
pub fn prior_free_bound(n: u64) -> f64 {
    assert!(n >= 1, "guarantees require at least one expert");
    let nf = n as f64;
    let root = (3.0 * nf * nf - 3.0 * nf + 1.0).sqrt();
    2.0 / nf - (nf - 1.0) / (2.0 * nf * (2.0 * nf - 1.0 + root)) - 1.0 / (nf * nf)
}

/// The optimal extremization factor
/// `d = n (sqrt(3n² - 3n + 1) - 2) / (n² - n - 1)`; at `n = 1` this is
/// exactly 1 (a lone expert's forecast is best left alone).
///
/// # Panics
/// Panics if `n == 0`.
pub fn known_prior_d(n: u64) -> f64 {
    assert!(n >= 1, "guarantees require at least one expert");
    let nf = n as f64;
    nf * ((3.0 * nf * nf - 3.0 * nf + 1.0).sqrt() - 2.0) / (nf * nf - nf - 1.0)
}

/// Known-prior inequality coefficients for extremization factor `d`:
/// `a` is the larger root of `n a² - ((2/d) n - 1) a + (n - 1)/4 + ...`,
/// written here via `a = (t + sqrt(t² - n(n-1))) / (2n)` with
/// `t = (2/d) n - 1`, and `b = (2a - 1)² / (4a)`.
///
/// # Errors
/// [`GuaranteeError::InvalidFactor`] if `d` is outside `(0, 2]`,
/// [`GuaranteeError::NegativeDiscriminant`] if `t² < n(n - 1)`.
///
/// # Panics
/// Panics if `n == 0`.
pub fn ab_known_prior(n: u64, d: f64) -> Result<(f64, f64), GuaranteeError> {
    assert!(n >= 1, "guarantees require at least one expert");
    if !d.is_finite() || d <= 0.0 || d > 2.0 {
        return Err(GuaranteeError::InvalidFactor { d });
    }
    let nf = n as f64;
    let t = (2.0 / d) * nf - 1.0;
    let disc = t * t - nf * (nf - 1.0);
    if disc < 0.0 {
        return Err(GuaranteeError::NegativeDiscriminant { n, d });
    }
    let a = (t + disc.sqrt()) / (2.0 * nf);
    let b = (2.0 * a - 1.0).powi(2) / (4.0 * a);
    Ok((a, b))
}

/// The known-prior guarantee at a fixed extremization factor,
/// `1 - [1 + (d² - 2d)/n - (a - b)(n - 1) d² / n²]`, or negative infinity
/// where the coefficients do not exist so that maximization routines avoid
/// the region.
pub fn known_prior_objective(n: u64, d: f64) -> f64 {
    match ab_known_prior(n, d) {
        Ok((a, b)) => {
            let nf = n as f64;
            1.0 - (1.0 + (d * d - 2.0 * d) / nf - (a - b) * (nf - 1.0) * d * d / (nf * nf))
        }
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Result of maximizing the known-prior objective over `d`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimizedBound {
    /// The maximized guarantee.
    pub bound: f64,
    /// The maximizing extremization factor.
    pub d_star: f64,
}

/// Maximizes the known-prior objective over `d ∈ (0, 2]`.
///
/// Golden-section search narrows the maximizer to `1e-10` in interval width;
/// because function-value comparisons lose resolution near a smooth maximum,
/// a bisection on the sign of a central-difference derivative then restores
/// the maximizer to ~1e-10 absolute accuracy.
///
/// # Panics
/// Panics if `n == 0`.
pub fn known_prior_optimize(n: u64) -> OptimizedBound {
    assert!(n >= 1, "guarantees require at least one expert");
    let f = |d: f64| known_prior_objective(n, d);
    let mut lo = 1e-9;
    let mut hi = 2.0;
    let invphi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut m1 = hi - invphi * (hi - lo);
    let mut m2 = lo + invphi * (hi - lo);
    let mut f1 = f(m1);
    let mut f2 = f(m2);
    while hi - lo > SEARCH_TOLERANCE {
        if f1 > f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - invphi * (hi - lo);
            f1 = f(m1);
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + invphi * (hi - lo);
            f2 = f(m2);
        }
    }
    let mut d_star = 0.5 * (lo + hi);

    // Central-difference derivative sign; the step is large enough that the
    // difference dominates rounding noise near the maximum.
    let h = 1e-5;
    let g = |d: f64| f(d + h) - f(d - h);
    let half_width = 1e-4;
    let mut glo = d_star - half_width;
    let mut ghi = d_star + half_width;
    if g(glo) > 0.0 && g(ghi) < 0.0 {
        while ghi - glo > 1e-12 {
            let mid = 0.5 * (glo + ghi);
            if g(mid) > 0.0 {
                glo = mid;
            } else {
                ghi = mid;
            }
        }
        d_star = 0.5 * (glo + ghi);
    }
    OptimizedBound { bound: f(d_star), d_star }
}

/// Worst-case approximation ratio of optimal extremization over projective
/// substitutes with a known prior.
///
/// # Panics
/// Panics if `n == 0`.
pub fn known_prior_bound(n: u64) -> f64 {
    known_prior_optimize(n).bound
}

/// Upper bound on any prior-free aggregator over weak substitutes:
/// `2/n - 1/n²`.
///
/// # Panics
/// Panics if `n == 0`.
pub fn negative_bound_prior_free(n: u64) -> f64 {
    assert!(n >= 1, "guarantees require at least one expert");
    let nf = n as f64;
    2.0 / nf - 1.0 / (nf * nf)
}

/// Upper bound on known-prior aggregators over projective substitutes,
/// conditional on the hardness of the underlying construction: `4n/(n+1)²`.
///
/// # Panics
/// Panics if `n == 0`.
pub fn negative_bound_known_prior(n: u64) -> f64 {
    assert!(n >= 1, "guarantees require at least one expert");
    let nf = n as f64;
    4.0 * nf / ((nf + 1.0) * (nf + 1.0))
}

/// A directly stated closed form for the known-prior guarantee,
/// `((3n² - 3n + 1)^{3/2} - 9n² + 9n + 1) / (2 (n² - n + 1)²)`.
///
/// At small `n` this expression disagrees with the optimization chain (at
/// `n = 2` it evaluates to ≈0.0845 while the chain yields ≈0.7601); the two
/// only converge asymptotically, with both scaling as `3√3 / (2n)`. Use
/// [`known_prior_discrepancy`] to see both values with a mismatch flag.
///
/// # Panics
/// Panics if `n == 0`.
pub fn known_prior_closed_form(n: u64) -> f64 {
    assert!(n >= 1, "guarantees require at least one expert");
    let nf = n as f64;
    let q = 3.0 * nf * nf - 3.0 * nf + 1.0;
    (q.powf(1.5) - 9.0 * nf * nf + 9.0 * nf + 1.0) / (2.0 * (nf * nf - nf + 1.0).powi(2))
}

/// Side-by-side comparison of the directly stated closed form and the
/// optimization chain for the known-prior guarantee.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedFormDiscrepancy {
    /// Value of the stated closed-form expression.
    pub closed_form: f64,
    /// Value produced by optimizing the coefficient chain over `d`.
    pub optimized: f64,
    /// Whether the two agree within `1e-9`.
    pub matches: bool,
}

/// Computes both known-prior guarantee values and whether they agree.
///
/// # Panics
/// Panics if `n == 0`.
pub fn known_prior_discrepancy(n: u64) -> ClosedFormDiscrepancy {
    let closed_form = known_prior_closed_form(n);
    let optimized = known_prior_bound(n);
    ClosedFormDiscrepancy {
        closed_form,
        optimized,
        matches: (closed_form - optimized).abs() <= DISCREPANCY_TOLERANCE,
    }
}

/// Result of a minimax search over extremization factors.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MinimaxResult {
    /// The maximin extremization factor (smallest maximizer under ties).
    pub d_star: f64,
    /// The worst instance ratio at `d_star`.
    pub worst_ratio: f64,
}

/// Maximizes `min_i ratio_i(d)` over `d ∈ [lo, hi]` by ternary search.
///
/// Each `ratio_i` must be continuous and concave on the interval, so the
/// pointwise minimum is concave and the search converges; ties resolve
/// toward the smallest maximizer.
///
/// # Panics
/// Panics if `instances` is empty or the interval is not a nonempty range.
pub fn minimax_d(instances: &[&dyn Fn(f64) -> f64], lo: f64, hi: f64) -> MinimaxResult {
    assert!(!instances.is_empty(), "minimax_d requires at least one instance");
    assert!(lo < hi && lo.is_finite() && hi.is_finite(), "invalid search interval");
    let worst = |d: f64| instances.iter().map(|f| f(d)).fold(f64::INFINITY, f64::min);
    let mut lo = lo;
    let mut hi = hi;
    while hi - lo > SEARCH_TOLERANCE {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if worst(m1) < worst(m2) {
            lo = m1;
        } else {
            // Ties shrink from the right so plateaus resolve to their left edge.
            hi = m2;
        }
    }
    let d_star = 0.5 * (lo + hi);
    MinimaxResult { d_star, worst_ratio: worst(d_star) }
}

/// One row of the guarantee table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GuaranteeRow {
    pub n: u64,
    pub prior_free_bound: f64,
    pub a_pf: f64,
    pub b_pf: f64,
    pub known_prior_d: f64,
    pub a_kp: f64,
    pub b_kp: f64,
    pub known_prior_bound: f64,
    pub neg_pf: f64,
    pub neg_kp_conditional: f64,
}

/// Guarantee table for `n = 1 ..= n_max`.
#[derive(Debug, Clone, Serialize)]
pub struct GuaranteeTable {
    pub rows: Vec<GuaranteeRow>,
}

impl GuaranteeTable {
    /// CSV rendering with one header line and one row per `n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,prior_free_bound,a_pf,b_pf,known_prior_d,a_kp,b_kp,known_prior_bound,neg_pf,neg_kp_conditional\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.n,
                r.prior_free_bound,
                r.a_pf,
                r.b_pf,
                r.known_prior_d,
                r.a_kp,
                r.b_kp,
                r.known_prior_bound,
                r.neg_pf,
                r.neg_kp_conditional,
            ));
        }
        out
    }
}

/// Computes the guarantee table for `n = 1 ..= n_max`.
///
/// # Panics
/// Panics if `n_max == 0`.
pub fn emit_guarantee_table(n_max: u64) -> GuaranteeTable {
    assert!(n_max >= 1, "guarantee tables start at n = 1");
    let rows = (1..=n_max)
        .map(|n| {
            let (a_pf, b_pf) = ab_prior_free(n);
            let d = known_prior_d(n);
            let (a_kp, b_kp) =
                ab_known_prior(n, d).expect("optimal factor lies in the valid domain");
            GuaranteeRow {
                n,
                prior_free_bound: prior_free_bound(n),
                a_pf,
                b_pf,
                known_prior_d: d,
                a_kp,
                b_kp,
                known_prior_bound: known_prior_bound(n),
                neg_pf: negative_bound_prior_free(n),
                neg_kp_conditional: negative_bound_known_prior(n),
            }
        })
        .collect();
    GuaranteeTable { rows }
}

//! Parametric Gaussian families with closed-form aggregation ratios.
//!
//! Three families of jointly normal signal models admit exact extremization
//! ratios, which makes them reference points for the finite-structure
//! machinery: independent signals centered at an unknown mean
//! ([`GaussianKind::IndependentMu`]), independent standard signals
//! ([`GaussianKind::IndependentStandard`]), and a single shared signal
//! observed by everyone ([`GaussianKind::FullyDependent`]). In each family
//! the outcome is the sum of the experts' signal contributions, every
//! expert's forecast is an affine function of their own signal, and the
//! extremized average misses the outcome by an exact multiple of the
//! outcome's deviation from the prior.
//!
//! Monte Carlo estimation reproduces the closed forms with a pinned
//! deterministic sampler (see [`crate::rng`]); samples are drawn in fixed
//! 65536-sample streams combined in index order, so results are bit-stable
//! for a given seed regardless of the total sample count's factorization.

use serde::Serialize;
use thiserror::Error;

use crate::aggregators::extremize_value;
use crate::info_core::SignalSubset;
use crate::rng::NormalSource;

/// Samples per substream of the Monte Carlo estimator.
const SAMPLE_STREAM_LEN: u64 = 1 << 16;

/// Slack allowed when checking that a factor equals a required constant.
const FACTOR_TOLERANCE: f64 = 1e-12;

/// Errors from Gaussian-family queries.
#[derive(Debug, Error, PartialEq)]
pub enum GaussianError {
    /// The requested quantity has no supported closed form.
    #[error("unsupported query: {reason}")]
    UnsupportedQuery { reason: String },
    /// Families require at least one expert.
    #[error("family requires at least one expert")]
    ZeroExperts,
    /// The signal-mean parameter must be finite.
    #[error("signal mean must be finite")]
    NonFiniteMu,
    /// Monte Carlo estimation requires at least one sample.
    #[error("sample count must be positive")]
    ZeroSamples,
    /// A subset argument references experts outside the family.
    #[error("subset references experts outside 0..{n}")]
    SubsetOutOfRange { n: usize },
    /// An expert index argument is out of range.
    #[error("expert index {index} out of range for {n} experts")]
    ExpertOutOfRange { index: usize, n: usize },
}

/// Which Gaussian family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GaussianKind {
    /// Signals `sigma_i = mu + z_i` with independent standard `z_i`; the
    /// common mean `mu` is known to the experts but not the aggregator, so
    /// only the plain average (`d = 1`) is meaningful.
    IndependentMu { mu: f64 },
    /// Independent standard signals with a known zero prior.
    IndependentStandard,
    /// One shared standard signal observed by every expert.
    FullyDependent,
}

/// A Gaussian family instantiated with an expert count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianFamily {
    kind: GaussianKind,
    n: usize,
}

/// A Monte Carlo estimate of an aggregation ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    /// Estimated approximation ratio.
    pub ratio_hat: f64,
    /// Delta-method standard error of `ratio_hat`.
    pub stderr: f64,
    /// Number of samples drawn.
    pub samples: u64,
    /// Seed the sampler was pinned to.
    pub seed: u64,
}

/// Both sides of the projective-substitutes defining inequality, which these
/// families satisfy with closed-form prediction losses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// `E[(Y_B - Y_{B->A})²]`.
    pub lhs: f64,
    /// `E[(Y_{B∪i} - Y_{B∪i -> A∪i})²]`.
    pub rhs: f64,
}

impl GaussianFamily {
    /// Creates a family, validating the expert count and parameters.
    pub fn new(kind: GaussianKind, n: usize) -> Result<Self, GaussianError> {
        if n == 0 {
            return Err(GaussianError::ZeroExperts);
        }
        if let GaussianKind::IndependentMu { mu } = kind {
            if !mu.is_finite() {
                return Err(GaussianError::NonFiniteMu);
            }
        }
        Ok(GaussianFamily { kind, n })
    }

    /// The family kind.
    pub fn kind(&self) -> GaussianKind {
        self.kind
    }

    /// Number of experts.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Prior mean of the outcome.
    pub fn prior(&self) -> f64 {
        match self.kind {
            GaussianKind::IndependentMu { mu } => self.n as f64 * mu,
            GaussianKind::IndependentStandard | GaussianKind::FullyDependent => 0.0,
        }
    }

    /// Exact approximation ratio of extremizing the average by factor `d`.
    ///
    /// # Errors
    /// [`GaussianError::UnsupportedQuery`] for a non-finite `d`, or for
    /// `d != 1` on [`GaussianKind::IndependentMu`] (the aggregator cannot
    /// extremize toward a prior it does not know).
    pub fn closed_form_ratio(&self, d: f64) -> Result<f64, GaussianError> {
        if !d.is_finite() {
            return Err(GaussianError::UnsupportedQuery {
                reason: "extremization factor must be finite".into(),
            });
        }
        let n = self.n as f64;
        match self.kind {
            GaussianKind::IndependentMu { .. } => {
                if (d - 1.0).abs() > FACTOR_TOLERANCE {
                    return Err(GaussianError::UnsupportedQuery {
                        reason: format!(
                            "independent_mu supports only plain averaging (d = 1), got d = {d}"
                        ),
                    });
                }
                Ok(2.0 / n - 1.0 / (n * n))
            }
            GaussianKind::IndependentStandard => Ok(1.0 - ((n - d) / n).powi(2)),
            GaussianKind::FullyDependent => Ok(1.0 - (1.0 - d).powi(2)),
        }
    }

    /// Expert `i`'s forecast of the outcome given the signal vector.
    ///
    /// # Panics
    /// Panics if `signals.len() != n` or `i >= n`; callers own alignment.
    pub fn expert_forecast(&self, signals: &[f64], i: usize) -> f64 {
        assert_eq!(signals.len(), self.n, "signal vector length must equal the expert count");
        assert!(i < self.n, "expert index {i} out of range for {} experts", self.n);
        match self.kind {
            GaussianKind::IndependentMu { mu } => signals[i] + (self.n as f64 - 1.0) * mu,
            GaussianKind::IndependentStandard => signals[i],
            GaussianKind::FullyDependent => self.n as f64 * signals[i],
        }
    }

    /// Evaluates both sides of the projective-substitutes inequality for the
    /// triple `(A, B, i)` using the families' closed-form prediction losses.
    ///
    /// For the independent families both losses count independent signal
    /// coordinates: `lhs = |B \ A|` and `rhs = |(B∪i) \ (A∪i)|`. For the
    /// fully dependent family any non-empty conditioning set pins the shared
    /// signal exactly, so the right-hand side is identically zero and the
    /// left-hand side is `n²` exactly when `A = ∅` and `B ≠ ∅`.
    pub fn projective_identity_check(
        &self,
        a: SignalSubset,
        b: SignalSubset,
        i: usize,
    ) -> Result<IdentityCheck, GaussianError> {
        let full = SignalSubset::full(self.n);
        if !a.is_subset_of(full) || !b.is_subset_of(full) {
            return Err(GaussianError::SubsetOutOfRange { n: self.n });
        }
        if i >= self.n {
            return Err(GaussianError::ExpertOutOfRange { index: i, n: self.n });
        }
        match self.kind {
            GaussianKind::IndependentMu { .. } | GaussianKind::IndependentStandard => {
                let lhs = b.difference(a).len() as f64;
                let rhs = b.with(i).difference(a.with(i)).len() as f64;
                Ok(IdentityCheck { lhs, rhs })
            }
            GaussianKind::FullyDependent => {
                let n = self.n as f64;
                let lhs = if a.is_empty() && !b.is_empty() { n * n } else { 0.0 };
                Ok(IdentityCheck { lhs, rhs: 0.0 })
            }
        }
    }

    /// Monte Carlo estimate of the extremization ratio with a pinned seed.
    ///
    /// Draws are organized in fixed-length substreams seeded from the
    /// stream-splitting generator, so a given `(seed, n_samples)` pair
    /// produces bit-identical results on every run. The ratio estimator is
    /// `1 - Σ(Y - X)² / Σ(Y - prior)²` with a delta-method standard error.
    ///
    /// # Errors
    /// [`GaussianError::ZeroSamples`] if `n_samples == 0`; the same factor
    /// restrictions as [`Self::closed_form_ratio`] apply.
    pub fn sample_and_estimate_ratio(
        &self,
        d: f64,
        n_samples: u64,
        seed: u64,
    ) -> Result<MonteCarloEstimate, GaussianError> {
        if n_samples == 0 {
            return Err(GaussianError::ZeroSamples);
        }
        // Validates d (finiteness, independent_mu restriction) up front.
        self.closed_form_ratio(d)?;

        let n = self.n;
        let prior = self.prior();
        let mu = match self.kind {
            GaussianKind::IndependentMu { mu } => mu,
            _ => 0.0,
        };

        let mut total_u = 0.0f64;
        let mut total_v = 0.0f64;
        let mut total_uu = 0.0f64;
        let mut total_vv = 0.0f64;
        let mut total_uv = 0.0f64;

        let mut signals = vec![0.0f64; n];
        let mut forecasts = vec![0.0f64; n];
        let mut remaining = n_samples;
        let mut stream = 0u64;
        while remaining > 0 {
            let count = remaining.min(SAMPLE_STREAM_LEN);
            let mut source = NormalSource::from_stream(seed, stream);
            let mut su = 0.0f64;
            let mut sv = 0.0f64;
            let mut suu = 0.0f64;
            let mut svv = 0.0f64;
            let mut suv = 0.0f64;
            for _ in 0..count {
                match self.kind {
                    GaussianKind::FullyDependent => {
                        let z = source.next_normal();
                        signals.fill(z);
                    }
                    GaussianKind::IndependentMu { .. } | GaussianKind::IndependentStandard => {
                        for s in signals.iter_mut() {
                            *s = mu + source.next_normal();
                        }
                    }
                }
                let y: f64 = match self.kind {
                    GaussianKind::FullyDependent => n as f64 * signals[0],
                    _ => signals.iter().sum(),
                };
                for (i, f) in forecasts.iter_mut().enumerate() {
                    *f = self.expert_forecast(&signals, i);
                }
                let x = extremize_value(&forecasts, prior, d);
                let u = (y - x) * (y - x);
                let v = (y - prior) * (y - prior);
                su += u;
                sv += v;
                suu += u * u;
                svv += v * v;
                suv += u * v;
            }
            total_u += su;
            total_v += sv;
            total_uu += suu;
            total_vv += svv;
            total_uv += suv;
            remaining -= count;
            stream += 1;
        }

        let m = n_samples as f64;
        let rho = total_u / total_v;
        let ratio_hat = 1.0 - rho;
        // Var(u - rho v) estimated around its (exactly zero) mean; clamp the
        // cancellation residue so rounding cannot produce a negative variance.
        let var1 = (total_uu - 2.0 * rho * total_uv + rho * rho * total_vv) / m;
        let stderr = (var1.max(0.0) / m).sqrt() / (total_v / m);
        Ok(MonteCarloEstimate { ratio_hat, stderr, samples: n_samples, seed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn imu(mu: f64, n: usize) -> GaussianFamily {
        GaussianFamily::new(GaussianKind::IndependentMu { mu }, n).unwrap()
    }

    fn ind(n: usize) -> GaussianFamily {
        GaussianFamily::new(GaussianKind::IndependentStandard, n).unwrap()
    }

    fn dep(n: usize) -> GaussianFamily {
        GaussianFamily::new(GaussianKind::FullyDependent, n).unwrap()
    }

    #[test]
    fn closed_forms_match_their_formulas() {
        for n in [2usize, 3, 5, 10] {
            let nf = n as f64;
            let r = imu(0.7, n).closed_form_ratio(1.0).unwrap();
            assert!((r - (2.0 / nf - 1.0 / (nf * nf))).abs() < 1e-15, "n={n}");
            for d in [0.5, 1.0, nf / 2.0] {
                let r = ind(n).closed_form_ratio(d).unwrap();
                assert!((r - (1.0 - ((nf - d) / nf).powi(2))).abs() < 1e-15);
            }
            for d in [0.5, 1.0, 1.5] {
                let r = dep(n).closed_form_ratio(d).unwrap();
                assert!((r - (1.0 - (1.0 - d).powi(2))).abs() < 1e-15);
            }
        }
        // Spot values: averaging three independent experts, unit extremization
        // on the shared-signal family.
        assert!((ind(3).closed_form_ratio(1.0).unwrap() - 5.0 / 9.0).abs() < 1e-15);
        assert!((dep(7).closed_form_ratio(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn averaging_ratio_is_mu_invariant() {
        let reference = imu(0.0, 3).closed_form_ratio(1.0).unwrap();
        for mu in [-10.0, 0.0, 3.7, 100.0] {
            let r = imu(mu, 3).closed_form_ratio(1.0).unwrap();
            assert_eq!(r, reference);
            let est = imu(mu, 3).sample_and_estimate_ratio(1.0, 50_000, 7).unwrap();
            assert!(
                (est.ratio_hat - reference).abs() <= 4.0 * est.stderr + 1e-12,
                "mu={mu}: {} vs {reference}",
                est.ratio_hat
            );
        }
    }

    #[test]
    fn unknown_prior_family_rejects_extremization() {
        let err = imu(0.3, 3).closed_form_ratio(1.5).unwrap_err();
        assert!(matches!(err, GaussianError::UnsupportedQuery { .. }));
        let err = imu(0.3, 3).sample_and_estimate_ratio(0.5, 10, 1).unwrap_err();
        assert!(matches!(err, GaussianError::UnsupportedQuery { .. }));
    }

    #[test]
    fn construction_validates_parameters() {
        assert_eq!(
            GaussianFamily::new(GaussianKind::IndependentStandard, 0).unwrap_err(),
            GaussianError::ZeroExperts
        );
        assert_eq!(
            GaussianFamily::new(GaussianKind::IndependentMu { mu: f64::NAN }, 2).unwrap_err(),
            GaussianError::NonFiniteMu
        );
    }

    #[test]
    fn forecasts_follow_the_signal_models() {
        let f = imu(0.3, 3);
        let signals = [1.0, -0.5, 2.0];
        assert!((f.expert_forecast(&signals, 0) - 1.6).abs() < 1e-15);
        assert!((f.expert_forecast(&signals, 2) - 2.6).abs() < 1e-15);
        let f = ind(3);
        assert_eq!(f.expert_forecast(&signals, 1), -0.5);
        let f = dep(3);
        let signals = [0.4, 0.4, 0.4];
        assert!((f.expert_forecast(&signals, 1) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn identity_check_counts_unshared_signals() {
        let f = ind(3);
        let a = SignalSubset::from_indices(&[0], 3).unwrap();
        let b = SignalSubset::from_indices(&[1, 2], 3).unwrap();
        let chk = f.projective_identity_check(a, b, 0).unwrap();
        assert_eq!((chk.lhs, chk.rhs), (2.0, 2.0));
        let chk = f.projective_identity_check(SignalSubset::empty(), b, 1).unwrap();
        assert_eq!((chk.lhs, chk.rhs), (2.0, 1.0));
        assert!(chk.lhs >= chk.rhs);
        let f = imu(5.0, 3);
        let chk = f.projective_identity_check(a, b, 2).unwrap();
        assert_eq!((chk.lhs, chk.rhs), (2.0, 1.0));
    }

    #[test]
    fn identity_check_shared_signal_rhs_is_zero() {
        let f = dep(4);
        let b = SignalSubset::from_indices(&[1, 3], 4).unwrap();
        let chk = f.projective_identity_check(SignalSubset::empty(), b, 0).unwrap();
        assert_eq!((chk.lhs, chk.rhs), (16.0, 0.0));
        let a = SignalSubset::from_indices(&[2], 4).unwrap();
        let chk = f.projective_identity_check(a, b, 0).unwrap();
        assert_eq!((chk.lhs, chk.rhs), (0.0, 0.0));
        let chk =
            f.projective_identity_check(SignalSubset::empty(), SignalSubset::empty(), 0).unwrap();
        assert_eq!((chk.lhs, chk.rhs), (0.0, 0.0));
    }

    #[test]
    fn identity_check_validates_arguments() {
        let f = ind(2);
        let wide = SignalSubset::from_indices(&[0, 2], 3).unwrap();
        assert_eq!(
            f.projective_identity_check(wide, SignalSubset::empty(), 0).unwrap_err(),
            GaussianError::SubsetOutOfRange { n: 2 }
        );
        assert_eq!(
            f.projective_identity_check(SignalSubset::empty(), SignalSubset::empty(), 2)
                .unwrap_err(),
            GaussianError::ExpertOutOfRange { index: 2, n: 2 }
        );
    }

    #[test]
    fn monte_carlo_matches_closed_forms() {
        let cases: Vec<(GaussianFamily, f64)> =
            vec![(ind(3), 1.0), (ind(2), 4.0 / 3.0), (dep(5), 5.0 / 3.0), (imu(7.0, 2), 1.0)];
        for (family, d) in cases {
            let closed = family.closed_form_ratio(d).unwrap();
            let est = family.sample_and_estimate_ratio(d, 100_000, 0xC0FFEE).unwrap();
            assert!(
                (est.ratio_hat - closed).abs() <= 4.0 * est.stderr + 1e-12,
                "{family:?} d={d}: {} vs {closed} (stderr {})",
                est.ratio_hat,
                est.stderr
            );
        }
    }

    #[test]
    fn monte_carlo_is_bit_stable() {
        let family = ind(3);
        let a = family.sample_and_estimate_ratio(1.0, 150_000, 0xC0FFEE).unwrap();
        let b = family.sample_and_estimate_ratio(1.0, 150_000, 0xC0FFEE).unwrap();
        assert_eq!(a.ratio_hat.to_bits(), b.ratio_hat.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        let c = family.sample_and_estimate_ratio(1.0, 150_000, 0xC0FFEF).unwrap();
        assert_ne!(a.ratio_hat.to_bits(), c.ratio_hat.to_bits());
    }

    #[test]
    fn monte_carlo_rejects_empty_sampling() {
        assert_eq!(
            ind(2).sample_and_estimate_ratio(1.0, 0, 1).unwrap_err(),
            GaussianError::ZeroSamples
        );
    }

    #[test]
    fn minimax_over_the_concave_pair_matches_the_closed_form() {
        for n in [2usize, 3, 5, 10, 16] {
            let nf = n as f64;
            let ind_fam = ind(n);
            let dep_fam = dep(n);
            let f_ind = move |d: f64| ind_fam.closed_form_ratio(d).unwrap();
            let f_dep = move |d: f64| dep_fam.closed_form_ratio(d).unwrap();
            let fns: Vec<&dyn Fn(f64) -> f64> = vec![&f_ind, &f_dep];
            let res = crate::guarantees::minimax_d(&fns, 0.0, 2.0 * nf);
            assert!((res.d_star - 2.0 * nf / (nf + 1.0)).abs() < 1e-8, "n={n}");
            assert!((res.worst_ratio - 4.0 * nf / ((nf + 1.0) * (nf + 1.0))).abs() < 1e-8);
        }
    }
}

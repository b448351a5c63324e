//! Deterministic aggregation strategies.
//!
//! A [`Strategy`] maps the vector of expert forecasts realised in a state
//! (and, for prior-aware strategies, the prior mean) to a single aggregate
//! value; [`apply`] evaluates it statewise over an [`InfoStructure`]. The
//! random-expert strategy is special: it has no statewise output and is
//! evaluated in expectation by [`random_expert_value`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::info_core::{InfoError, InfoStructure, SignalSubset, StateVariable};

/// Scale used for canonical tabular keys: forecasts are rounded to 12
/// decimals before lookup, so the irrational forecasts of the tight catalog
/// instances hash identically across arithmetic orderings.
const KEY_SCALE: f64 = 1e12;

/// Errors from constructing or applying a strategy.
#[derive(Debug, Error, PartialEq)]
pub enum AggregatorError {
    /// The strategy produces no statewise output (random expert).
    #[error("strategy `{strategy}` has no statewise output; evaluate it with random_expert_value")]
    KindMismatch { strategy: String },
    /// A realized forecast tuple is missing from a tabular strategy that has
    /// no default rule.
    #[error("tabular strategy does not cover the forecast tuple {forecasts:?} realized in state {state}")]
    UncoveredForecastTuple { state: usize, forecasts: Vec<f64> },
    /// Extremization factors must be finite.
    #[error("extremization factor {d} is not finite")]
    NonFiniteFactor { d: f64 },
    /// Tabular entries must be finite.
    #[error("tabular entry {index} contains a non-finite number")]
    NonFiniteEntry { index: usize },
    /// Underlying structure computation failed.
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// Whether the aggregator may consult the prior mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationSetting {
    PriorFree,
    KnownPrior,
}

/// A deterministic aggregation strategy.
#[derive(Debug, Clone)]
pub enum Strategy {
    /// Arithmetic mean of the forecasts.
    Average,
    /// Mean pushed away from the prior by factor `d`.
    Extremize { d: f64 },
    /// Uniformly random expert's forecast, evaluated in expectation.
    RandomExpertExpectation,
    /// The prior mean, ignoring all forecasts.
    PriorOnly,
    /// Explicit lookup table from forecast tuples to outputs.
    Tabular(TabularStrategy),
}

impl Strategy {
    /// Whether the strategy consults the prior mean.
    pub fn uses_prior(&self) -> bool {
        matches!(self, Strategy::Extremize { .. } | Strategy::PriorOnly)
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Average => write!(f, "average"),
            Strategy::Extremize { d } => write!(f, "extremize(d={d})"),
            Strategy::RandomExpertExpectation => write!(f, "random-expert"),
            Strategy::PriorOnly => write!(f, "prior"),
            Strategy::Tabular(t) => write!(f, "tabular({} entries)", t.len()),
        }
    }
}

/// Canonical lookup key: each forecast rounded to 12 decimals.
pub fn canonical_key(forecasts: &[f64]) -> Vec<i64> {
    forecasts.iter().map(|f| (f * KEY_SCALE).round() as i64).collect()
}

/// Serialization record for one tabular rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TabularEntry {
    pub forecasts: Vec<f64>,
    pub output: f64,
}

/// Serialization record for a tabular strategy file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TabularSpec {
    pub entries: Vec<TabularEntry>,
    #[serde(default)]
    pub default: Option<f64>,
}

/// Lookup table from canonicalized forecast tuples to outputs, with an
/// optional default for uncovered tuples.
#[derive(Debug, Clone, Default)]
pub struct TabularStrategy {
    entries: HashMap<Vec<i64>, f64>,
    default: Option<f64>,
}

impl TabularStrategy {
    /// An empty table with no default.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the table from its serialization record, rejecting non-finite
    /// numbers.
    pub fn from_spec(spec: &TabularSpec) -> Result<Self, AggregatorError> {
        let mut table = TabularStrategy::new();
        for (index, entry) in spec.entries.iter().enumerate() {
            if !entry.output.is_finite() || entry.forecasts.iter().any(|f| !f.is_finite()) {
                return Err(AggregatorError::NonFiniteEntry { index });
            }
            table.insert(&entry.forecasts, entry.output);
        }
        if let Some(d) = spec.default {
            if !d.is_finite() {
                return Err(AggregatorError::NonFiniteEntry { index: spec.entries.len() });
            }
            table.default = Some(d);
        }
        Ok(table)
    }

    /// Adds (or overwrites) a rule for a forecast tuple.
    pub fn insert(&mut self, forecasts: &[f64], output: f64) {
        self.entries.insert(canonical_key(forecasts), output);
    }

    /// Sets the default output for uncovered tuples.
    pub fn set_default(&mut self, output: f64) {
        self.default = Some(output);
    }

    /// Looks up a forecast tuple, falling back to the default.
    pub fn lookup(&self, forecasts: &[f64]) -> Option<f64> {
        self.entries.get(&canonical_key(forecasts)).copied().or(self.default)
    }

    /// Number of explicit rules.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Whether the table has no explicit rules.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Each expert's forecast as a state variable, indexed by expert.
pub fn expert_forecasts(info: &InfoStructure) -> Vec<StateVariable> {
    (0..info.n_experts())
        .map(|i| {
            let single =
                SignalSubset::singleton(i, info.n_experts()).expect("expert index below n_experts");
            info.conditional_expectation(single)
        })
        .collect()
}

/// Extremized aggregate: the forecast mean pushed away from the prior by
/// factor `d` — `mean + (d - 1)(mean - prior)`.
///
/// # Panics
/// Panics if `forecasts` is empty.
pub fn extremize_value(forecasts: &[f64], prior: f64, d: f64) -> f64 {
    assert!(!forecasts.is_empty(), "extremize_value requires at least one forecast");
    let mean = forecasts.iter().sum::<f64>() / forecasts.len() as f64;
    mean + (d - 1.0) * (mean - prior)
}

/// Applies a strategy statewise.
///
/// # Errors
/// [`AggregatorError::KindMismatch`] for the random-expert strategy,
/// [`AggregatorError::UncoveredForecastTuple`] for tabular gaps without a
/// default, [`AggregatorError::NonFiniteFactor`] for a non-finite
/// extremization factor.
pub fn apply(info: &InfoStructure, strategy: &Strategy) -> Result<StateVariable, AggregatorError> {
    if let Strategy::Extremize { d } = strategy {
        if !d.is_finite() {
            return Err(AggregatorError::NonFiniteFactor { d: *d });
        }
    }
    if matches!(strategy, Strategy::RandomExpertExpectation) {
        return Err(AggregatorError::KindMismatch { strategy: strategy.to_string() });
    }
    let forecasts = expert_forecasts(info);
    let prior = info.prior();
    let n = info.n_experts();
    let mut tuple = vec![0.0; n];
    let mut values = Vec::with_capacity(info.n_states());
    for state in 0..info.n_states() {
        for (i, f) in forecasts.iter().enumerate() {
            tuple[i] = f.get(state);
        }
        let out = match strategy {
            Strategy::Average => extremize_value(&tuple, prior, 1.0),
            Strategy::Extremize { d } => extremize_value(&tuple, prior, *d),
            Strategy::PriorOnly => prior,
            Strategy::Tabular(table) => table.lookup(&tuple).ok_or_else(|| {
                AggregatorError::UncoveredForecastTuple { state, forecasts: tuple.clone() }
            })?,
            Strategy::RandomExpertExpectation => unreachable!("rejected above"),
        };
        values.push(out);
    }
    StateVariable::new(values).map_err(AggregatorError::from)
}

/// Expected value of the uniformly-random-expert strategy:
/// the mean of the individual forecast values, `(1/n) Σᵢ v(Yᵢ)`.
pub fn random_expert_value(info: &InfoStructure) -> f64 {
    let forecasts = expert_forecasts(info);
    let total: f64 = forecasts.iter().map(|f| info.value(f)).sum();
    total / info.n_experts() as f64
}

/// Approximation ratio of a strategy: `value(output) / value(joint
/// forecast)`, with the random-expert strategy evaluated in expectation.
pub fn approximation_ratio_of(
    info: &InfoStructure,
    strategy: &Strategy,
) -> Result<f64, AggregatorError> {
    if matches!(strategy, Strategy::RandomExpertExpectation) {
        let benchmark = info.conditional_expectation(info.all_experts());
        let v_full = info.value(&benchmark);
        if v_full <= crate::info_core::DEGENERACY_TOLERANCE {
            return Err(AggregatorError::Info(InfoError::DegenerateStructure { v_full }));
        }
        return Ok(random_expert_value(info) / v_full);
    }
    let output = apply(info, strategy)?;
    info.approximation_ratio(&output).map_err(AggregatorError::from)
}

/// The two-expert minimax tabular aggregator for the tight catalog
/// instances: symmetric agreement is amplified, disagreement maps to 0.
///
/// Prior-free: `(1,1) -> 1`, `(-1,-1) -> -1`, mixed `-> 0`. Known-prior:
/// agreement maps to `±2(√7 - 2)` instead of `±1`.
pub fn optimal_tabular_aggregator(setting: AggregationSetting) -> Strategy {
    let peak = match setting {
        AggregationSetting::PriorFree => 1.0,
        AggregationSetting::KnownPrior => 2.0 * 7.0_f64.sqrt() - 4.0,
    };
    let mut table = TabularStrategy::new();
    table.insert(&[1.0, 1.0], peak);
    table.insert(&[1.0, -1.0], 0.0);
    table.insert(&[-1.0, 1.0], 0.0);
    table.insert(&[-1.0, -1.0], -peak);
    Strategy::Tabular(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info_core::State;

    fn state(prob: f64, signals: &[&str], y: f64) -> State {
        State { prob, signals: signals.iter().map(|s| s.to_string()).collect(), y }
    }

    fn xor() -> InfoStructure {
        InfoStructure::new(
            2,
            vec![
                state(0.25, &["0", "0"], 0.0),
                state(0.25, &["0", "1"], 1.0),
                state(0.25, &["1", "0"], 1.0),
                state(0.25, &["1", "1"], 0.0),
            ],
        )
        .unwrap()
    }

    fn same_bit() -> InfoStructure {
        InfoStructure::new(2, vec![state(0.5, &["0", "0"], 0.0), state(0.5, &["1", "1"], 1.0)])
            .unwrap()
    }

    /// Two independent uniform bits, outcome = their sum.
    fn independent_sum() -> InfoStructure {
        InfoStructure::new(
            2,
            vec![
                state(0.25, &["0", "0"], 0.0),
                state(0.25, &["0", "1"], 1.0),
                state(0.25, &["1", "0"], 1.0),
                state(0.25, &["1", "1"], 2.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn average_on_xor_is_the_prior() {
        let out = apply(&xor(), &Strategy::Average).unwrap();
        for v in out.values() {
            assert!((v - 0.5).abs() < 1e-15);
        }
        let r = approximation_ratio_of(&xor(), &Strategy::Average).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn extremize_with_unit_factor_is_average() {
        let info = independent_sum();
        let avg = apply(&info, &Strategy::Average).unwrap();
        let ext = apply(&info, &Strategy::Extremize { d: 1.0 }).unwrap();
        for (a, b) in avg.values().iter().zip(ext.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn extremize_with_zero_factor_is_the_prior() {
        let info = independent_sum();
        let out = apply(&info, &Strategy::Extremize { d: 0.0 }).unwrap();
        for v in out.values() {
            assert!((v - info.prior()).abs() < 1e-15);
        }
    }

    #[test]
    fn extremize_by_expert_count_recovers_additive_outcomes() {
        // With independent signals and an additive outcome, each forecast is
        // its own signal plus the other's mean, so extremizing by n undoes
        // the shrinkage exactly.
        let info = independent_sum();
        let out = apply(&info, &Strategy::Extremize { d: 2.0 }).unwrap();
        for (v, s) in out.values().iter().zip(info.states()) {
            assert!((v - s.y).abs() < 1e-12, "got {v}, want {}", s.y);
        }
    }

    #[test]
    fn extremize_value_matches_hand_computation() {
        assert!((extremize_value(&[1.0, 1.0], 0.0, 2.0) - 2.0).abs() < 1e-15);
        assert!((extremize_value(&[0.3, 0.9], 0.7, 0.0) - 0.7).abs() < 1e-15);
        assert!((extremize_value(&[0.7, 0.5], 0.5, 1.2915) - 0.62915).abs() < 1e-12);
    }

    #[test]
    fn random_expert_value_matches_fixtures() {
        assert!(random_expert_value(&xor()).abs() < 1e-15);
        assert!((random_expert_value(&same_bit()) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn random_expert_strategy_has_no_statewise_output() {
        match apply(&xor(), &Strategy::RandomExpertExpectation) {
            Err(AggregatorError::KindMismatch { .. }) => {}
            other => panic!("expected kind mismatch, got {other:?}"),
        }
    }

    #[test]
    fn tabular_rounding_canonicalizes_near_keys() {
        let mut table = TabularStrategy::new();
        table.insert(&[1.0, -1.0], 7.0);
        // Within half of the 12th decimal: same key.
        assert_eq!(table.lookup(&[1.0000000000004, -1.0]), Some(7.0));
        // Beyond it: different key, no default.
        assert_eq!(table.lookup(&[1.0000000000006, -1.0]), None);
        table.set_default(0.0);
        assert_eq!(table.lookup(&[2.0, 2.0]), Some(0.0));
    }

    #[test]
    fn tabular_gaps_without_default_are_errors() {
        // On the shared-bit structure the forecast tuples are (0, 0) and
        // (1, 1); cover only the first.
        let mut table = TabularStrategy::new();
        table.insert(&[0.0, 0.0], 1.0);
        let err = apply(&same_bit(), &Strategy::Tabular(table.clone())).unwrap_err();
        match err {
            AggregatorError::UncoveredForecastTuple { state, forecasts } => {
                assert_eq!(state, 1);
                assert_eq!(forecasts, vec![1.0, 1.0]);
            }
            other => panic!("expected an uncovered-tuple error, got {other:?}"),
        }
        table.set_default(0.25);
        let out = apply(&same_bit(), &Strategy::Tabular(table)).unwrap();
        assert_eq!(out.values(), &[1.0, 0.25]);
    }

    #[test]
    fn tabular_spec_round_trip_and_validation() {
        let spec = TabularSpec {
            entries: vec![TabularEntry { forecasts: vec![1.0, 2.0], output: 3.0 }],
            default: Some(0.5),
        };
        let table = TabularStrategy::from_spec(&spec).unwrap();
        assert_eq!(table.lookup(&[1.0, 2.0]), Some(3.0));
        assert_eq!(table.lookup(&[9.0, 9.0]), Some(0.5));
        let bad = TabularSpec {
            entries: vec![TabularEntry { forecasts: vec![f64::NAN], output: 0.0 }],
            default: None,
        };
        assert_eq!(
            TabularStrategy::from_spec(&bad).unwrap_err(),
            AggregatorError::NonFiniteEntry { index: 0 }
        );
    }

    #[test]
    fn optimal_tabular_aggregators_match_stated_rules() {
        let pf = optimal_tabular_aggregator(AggregationSetting::PriorFree);
        let Strategy::Tabular(table) = &pf else { panic!("expected tabular") };
        assert_eq!(table.lookup(&[1.0, 1.0]), Some(1.0));
        assert_eq!(table.lookup(&[1.0, -1.0]), Some(0.0));
        assert_eq!(table.lookup(&[-1.0, 1.0]), Some(0.0));
        assert_eq!(table.lookup(&[-1.0, -1.0]), Some(-1.0));

        let kp = optimal_tabular_aggregator(AggregationSetting::KnownPrior);
        let Strategy::Tabular(table) = &kp else { panic!("expected tabular") };
        let peak = table.lookup(&[1.0, 1.0]).unwrap();
        assert!((peak - 6.0 / (2.0 + 7.0_f64.sqrt())).abs() < 1e-12);
        assert!((table.lookup(&[-1.0, -1.0]).unwrap() + peak).abs() < 1e-15);
        assert_eq!(table.lookup(&[1.0, -1.0]), Some(0.0));
    }

    #[test]
    fn non_finite_extremization_factor_is_rejected() {
        let err = apply(&xor(), &Strategy::Extremize { d: f64::NAN }).unwrap_err();
        assert!(matches!(err, AggregatorError::NonFiniteFactor { .. }));
    }

    #[test]
    fn uses_prior_reflects_strategy_kind() {
        assert!(!Strategy::Average.uses_prior());
        assert!(Strategy::Extremize { d: 1.5 }.uses_prior());
        assert!(Strategy::PriorOnly.uses_prior());
        assert!(!Strategy::RandomExpertExpectation.uses_prior());
        assert!(!Strategy::Tabular(TabularStrategy::new()).uses_prior());
    }
}

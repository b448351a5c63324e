//! Finite information structures and exact conditional-expectation algebra.
//!
//! An [`InfoStructure`] is a finite probability space: each state carries a
//! strictly positive probability, one signal label per expert, and a real
//! outcome `y`. Every quantity this crate reasons about — expert forecasts,
//! joint forecasts, predictions of other experts' forecasts, squared-error
//! value — is a state-indexed variable obtained by averaging within the
//! partition that a subset of signals induces on the state space. All
//! computation is exact enumeration over states; nothing is sampled here.

use std::collections::HashMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest expert count representable by [`SignalSubset`]'s bitmask.
pub const MAX_EXPERTS: usize = 64;

/// Probability sums must match 1 to within this tolerance on strict load.
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

/// Opt-in renormalisation accepts probability sums within this tolerance.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

/// Below this joint-forecast value a structure is considered degenerate and
/// approximation ratios are undefined.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Maximum allowed disagreement between the two internal routes for
/// computing an approximation ratio.
pub const RATIO_CONSISTENCY_TOLERANCE: f64 = 1e-9;

/// Errors from constructing or querying an information structure.
#[derive(Debug, Error, PartialEq)]
pub enum InfoError {
    /// A structure must contain at least one state.
    #[error("structure has no states")]
    EmptyStates,
    /// A structure must have at least one expert.
    #[error("structure has no experts")]
    ZeroExperts,
    /// Expert counts are limited by the subset bitmask width.
    #[error("{n} experts exceeds the supported maximum of {MAX_EXPERTS}")]
    TooManyExperts { n: usize },
    /// Every state must carry exactly one signal per expert.
    #[error("state {state} has {got} signals, expected {expected}")]
    SignalArityMismatch { state: usize, expected: usize, got: usize },
    /// Probabilities must be finite.
    #[error("state {state} has a non-finite probability")]
    NonFiniteProb { state: usize },
    /// Probabilities must be strictly positive.
    #[error("state {state} has non-positive probability {prob}")]
    NonPositiveProb { state: usize, prob: f64 },
    /// Outcomes must be finite.
    #[error("state {state} has a non-finite outcome")]
    NonFiniteOutcome { state: usize },
    /// State-variable entries must be finite.
    #[error("state variable entry {index} is non-finite")]
    NonFiniteValue { index: usize },
    /// Probabilities must sum to 1 within tolerance.
    #[error("probabilities sum to {sum}, not 1")]
    ProbSumMismatch { sum: f64 },
    /// Subset constructors reject experts outside `0..n`.
    #[error("expert index {index} out of range for {n} experts")]
    ExpertOutOfRange { index: usize, n: usize },
    /// The joint forecast carries no value, so ratios are undefined.
    #[error("degenerate structure: joint forecast has value {v_full}")]
    DegenerateStructure { v_full: f64 },
    /// The two ratio formulas disagreed beyond tolerance; this indicates a
    /// numerically pathological instance.
    #[error("ratio routes disagree: direct {direct} vs residual {residual}")]
    InternalConsistency { direct: f64, residual: f64 },
}

/// One state: probability, per-expert signal labels, outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    /// Probability of the state; strictly positive.
    pub prob: f64,
    /// One label per expert; equal labels mean the expert cannot
    /// distinguish the states.
    pub signals: Vec<String>,
    /// Real outcome realised in this state.
    pub y: f64,
}

/// A set of expert indices, drawn from `0..n`.
///
/// Experts are indexed from 0 throughout the crate and in all reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignalSubset {
    bits: u64,
}

impl SignalSubset {
    /// The empty subset.
    pub fn empty() -> Self {
        SignalSubset { bits: 0 }
    }

    /// The full subset `{0, .., n-1}`.
    ///
    /// # Panics
    /// Panics if `n` exceeds [`MAX_EXPERTS`].
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_EXPERTS, "{n} experts exceeds the supported maximum");
        if n == MAX_EXPERTS {
            SignalSubset { bits: u64::MAX }
        } else {
            SignalSubset { bits: (1u64 << n) - 1 }
        }
    }

    /// The singleton `{i}` among `n` experts.
    pub fn singleton(i: usize, n: usize) -> Result<Self, InfoError> {
        Self::from_indices(&[i], n)
    }

    /// Builds a subset from explicit indices, validating against `n`.
    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self, InfoError> {
        if n > MAX_EXPERTS {
            return Err(InfoError::TooManyExperts { n });
        }
        let mut bits = 0u64;
        for &i in indices {
            if i >= n {
                return Err(InfoError::ExpertOutOfRange { index: i, n });
            }
            bits |= 1u64 << i;
        }
        Ok(SignalSubset { bits })
    }

    /// Builds a subset directly from a bitmask.
    pub fn from_bits(bits: u64) -> Self {
        SignalSubset { bits }
    }

    /// The raw bitmask.
    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Number of members.
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Whether the subset is empty.
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    /// Whether expert `i` is a member.
    pub fn contains(self, i: usize) -> bool {
        i < MAX_EXPERTS && self.bits & (1u64 << i) != 0
    }

    /// This subset with expert `i` added.
    pub fn with(self, i: usize) -> Self {
        assert!(i < MAX_EXPERTS, "expert index {i} out of range");
        SignalSubset { bits: self.bits | (1u64 << i) }
    }

    /// Set union.
    pub fn union(self, other: Self) -> Self {
        SignalSubset { bits: self.bits | other.bits }
    }

    /// Members of `self` not in `other`.
    pub fn difference(self, other: Self) -> Self {
        SignalSubset { bits: self.bits & !other.bits }
    }

    /// Whether every member of `self` lies in `other`.
    pub fn is_subset_of(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    /// Member indices in ascending order.
    pub fn indices(self) -> Vec<usize> {
        (0..MAX_EXPERTS).filter(|&i| self.contains(i)).collect()
    }
}

impl Serialize for SignalSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.indices().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SignalSubset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(deserializer)?;
        SignalSubset::from_indices(&indices, MAX_EXPERTS)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// A real variable defined statewise, aligned with a structure's state list.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVariable {
    values: Vec<f64>,
}

impl StateVariable {
    /// Wraps raw values, rejecting non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self, InfoError> {
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(InfoError::NonFiniteValue { index });
            }
        }
        Ok(StateVariable { values })
    }

    /// A constant variable over `len` states.
    pub fn constant(value: f64, len: usize) -> Self {
        StateVariable { values: vec![value; len] }
    }

    /// The values, one per state.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of states covered.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether the variable covers zero states.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value in state `i`.
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }
}

/// Partition of the state space induced by a subset of signals.
///
/// States sharing the projected signal tuple share a cell; cells are
/// numbered by first appearance in state order, so the layout is
/// deterministic.
#[derive(Debug, Clone)]
pub struct Partition {
    cell_of_state: Vec<usize>,
    n_cells: usize,
}

impl Partition {
    /// Cell index of state `i`.
    pub fn cell_of(&self, i: usize) -> usize {
        self.cell_of_state[i]
    }

    /// Number of cells.
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }
}

/// Serialization record for an instance file (`schema` is implied by the
/// enclosing document).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    /// Number of experts.
    pub n: usize,
    /// States in canonical order.
    pub states: Vec<State>,
}

/// A finite information structure.
///
/// Construction validates shape, finiteness, positivity, and the probability
/// sum; signal labels are interned per expert so all later partition queries
/// compare small integers rather than strings.
#[derive(Debug, Clone)]
pub struct InfoStructure {
    n: usize,
    states: Vec<State>,
    /// `signal_ids[state][expert]`: interned label.
    signal_ids: Vec<Vec<u32>>,
    prior: f64,
}

impl InfoStructure {
    /// Builds a structure, requiring probabilities to sum to 1 within
    /// [`PROB_SUM_TOLERANCE`].
    pub fn new(n: usize, states: Vec<State>) -> Result<Self, InfoError> {
        Self::build(n, states, false)
    }

    /// Builds a structure, renormalising probabilities whose sum is within
    /// [`RENORMALIZE_TOLERANCE`] of 1.
    pub fn new_renormalizing(n: usize, states: Vec<State>) -> Result<Self, InfoError> {
        Self::build(n, states, true)
    }

    fn build(n: usize, mut states: Vec<State>, renormalize: bool) -> Result<Self, InfoError> {
        if n == 0 {
            return Err(InfoError::ZeroExperts);
        }
        if n > MAX_EXPERTS {
            return Err(InfoError::TooManyExperts { n });
        }
        if states.is_empty() {
            return Err(InfoError::EmptyStates);
        }
        // Compensated summation keeps the strict tolerance meaningful even
        // for instances near the state-count cap, where naive accumulation
        // could drift past 1e-12 on exact inputs.
        let mut sum = 0.0;
        let mut compensation = 0.0;
        for (index, s) in states.iter().enumerate() {
            if s.signals.len() != n {
                return Err(InfoError::SignalArityMismatch {
                    state: index,
                    expected: n,
                    got: s.signals.len(),
                });
            }
            if !s.prob.is_finite() {
                return Err(InfoError::NonFiniteProb { state: index });
            }
            if s.prob <= 0.0 {
                return Err(InfoError::NonPositiveProb { state: index, prob: s.prob });
            }
            if !s.y.is_finite() {
                return Err(InfoError::NonFiniteOutcome { state: index });
            }
            let term = s.prob - compensation;
            let next = sum + term;
            compensation = (next - sum) - term;
            sum = next;
        }
        let tolerance = if renormalize { RENORMALIZE_TOLERANCE } else { PROB_SUM_TOLERANCE };
        if (sum - 1.0).abs() > tolerance {
            return Err(InfoError::ProbSumMismatch { sum });
        }
        if renormalize && sum != 1.0 {
            for s in &mut states {
                s.prob /= sum;
            }
        }

        let mut interner: Vec<HashMap<&str, u32>> = vec![HashMap::new(); n];
        let mut signal_ids = Vec::with_capacity(states.len());
        for s in &states {
            let mut row = Vec::with_capacity(n);
            for (expert, label) in s.signals.iter().enumerate() {
                let table = &mut interner[expert];
                let next = table.len() as u32;
                let id = *table.entry(label.as_str()).or_insert(next);
                row.push(id);
            }
            signal_ids.push(row);
        }

        let prior = states.iter().map(|s| s.prob * s.y).sum();
        Ok(InfoStructure { n, states, signal_ids, prior })
    }

    /// Parses the canonical JSON instance format.
    pub fn from_instance_file(file: InstanceFile) -> Result<Self, InfoError> {
        Self::new(file.n, file.states)
    }

    /// The canonical serialization record, states in stored order.
    pub fn to_instance_file(&self) -> InstanceFile {
        InstanceFile { n: self.n, states: self.states.clone() }
    }

    /// Number of experts.
    pub fn n_experts(&self) -> usize {
        self.n
    }

    /// Number of states.
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    /// The states, in canonical order.
    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// The prior mean `E[Y]`.
    pub fn prior(&self) -> f64 {
        self.prior
    }

    /// The outcome as a state variable.
    pub fn outcome(&self) -> StateVariable {
        StateVariable { values: self.states.iter().map(|s| s.y).collect() }
    }

    /// The subset of all experts.
    pub fn all_experts(&self) -> SignalSubset {
        SignalSubset::full(self.n)
    }

    fn assert_subset(&self, a: SignalSubset) {
        assert!(
            a.is_subset_of(SignalSubset::full(self.n)),
            "subset {:?} references experts outside 0..{}",
            a.indices(),
            self.n
        );
    }

    fn assert_aligned(&self, x: &StateVariable) {
        assert_eq!(
            x.len(),
            self.states.len(),
            "state variable covers {} states but the structure has {}",
            x.len(),
            self.states.len()
        );
    }

    /// The partition of states induced by the signals in `a`.
    ///
    /// # Panics
    /// Panics if `a` references experts outside this structure.
    pub fn partition(&self, a: SignalSubset) -> Partition {
        self.assert_subset(a);
        let members: Vec<usize> = a.indices();
        let mut lookup: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut cell_of_state = Vec::with_capacity(self.states.len());
        for ids in &self.signal_ids {
            let key: Vec<u32> = members.iter().map(|&i| ids[i]).collect();
            let next = lookup.len();
            let cell = *lookup.entry(key).or_insert(next);
            cell_of_state.push(cell);
        }
        Partition { n_cells: lookup.len(), cell_of_state }
    }

    /// Conditional expectation of an arbitrary variable given the signals in
    /// `a`: within each cell of the induced partition, `x` is replaced by its
    /// probability-weighted mean.
    ///
    /// # Panics
    /// Panics if `x` is misaligned or `a` references unknown experts.
    pub fn project(&self, x: &StateVariable, a: SignalSubset) -> StateVariable {
        self.assert_aligned(x);
        let partition = self.partition(a);
        let mut weight = vec![0.0; partition.n_cells()];
        let mut sum = vec![0.0; partition.n_cells()];
        for (i, s) in self.states.iter().enumerate() {
            let c = partition.cell_of(i);
            weight[c] += s.prob;
            sum[c] += s.prob * x.get(i);
        }
        let mean: Vec<f64> = sum.iter().zip(&weight).map(|(s, w)| s / w).collect();
        let values = (0..self.states.len()).map(|i| mean[partition.cell_of(i)]).collect();
        StateVariable { values }
    }

    /// The joint forecast of coalition `a`: `E[Y | signals in a]`.
    ///
    /// The empty subset yields the constant prior.
    pub fn conditional_expectation(&self, a: SignalSubset) -> StateVariable {
        self.project(&self.outcome(), a)
    }

    /// Coalition `a`'s prediction of coalition `b`'s forecast:
    /// the forecast of `b`, projected onto the signals of `a`.
    pub fn prediction(&self, b: SignalSubset, a: SignalSubset) -> StateVariable {
        self.project(&self.conditional_expectation(b), a)
    }

    /// Expectation of a variable under the state distribution.
    pub fn mean(&self, x: &StateVariable) -> f64 {
        self.assert_aligned(x);
        self.states.iter().zip(x.values()).map(|(s, v)| s.prob * v).sum()
    }

    /// Mean squared distance `E[(X - Z)^2]`.
    pub fn mean_squared_distance(&self, x: &StateVariable, z: &StateVariable) -> f64 {
        self.assert_aligned(x);
        self.assert_aligned(z);
        self.states
            .iter()
            .zip(x.values().iter().zip(z.values()))
            .map(|(s, (a, b))| s.prob * (a - b) * (a - b))
            .sum()
    }

    /// Squared-error value of a forecast: how much closer `x` is to the
    /// outcome than the prior is, `E[(Y - E[Y])^2] - E[(Y - X)^2]`.
    pub fn value(&self, x: &StateVariable) -> f64 {
        self.assert_aligned(x);
        let prior_const = StateVariable::constant(self.prior, self.states.len());
        let y = self.outcome();
        self.mean_squared_distance(&y, &prior_const) - self.mean_squared_distance(&y, x)
    }

    /// Whether `x` is exactly constant on each cell of the partition of `a`.
    pub fn is_measurable(&self, x: &StateVariable, a: SignalSubset) -> bool {
        self.assert_aligned(x);
        let partition = self.partition(a);
        let mut seen: Vec<Option<f64>> = vec![None; partition.n_cells()];
        for (i, &v) in x.values().iter().enumerate() {
            let c = partition.cell_of(i);
            match seen[c] {
                None => seen[c] = Some(v),
                Some(w) if w == v => {}
                Some(_) => return false,
            }
        }
        true
    }

    /// Fraction of the joint forecast's value achieved by `z`:
    /// `value(z) / value(joint forecast)`.
    ///
    /// When `z` is measurable with respect to all signals, the equivalent
    /// residual form `1 - E[(joint - z)^2] / E[(joint - E[Y])^2]` is computed
    /// as a cross-check; the two must agree within
    /// [`RATIO_CONSISTENCY_TOLERANCE`].
    ///
    /// # Errors
    /// [`InfoError::DegenerateStructure`] when the joint forecast's value is
    /// at most [`DEGENERACY_TOLERANCE`]; [`InfoError::InternalConsistency`]
    /// when the two routes disagree.
    pub fn approximation_ratio(&self, z: &StateVariable) -> Result<f64, InfoError> {
        self.assert_aligned(z);
        let full = self.all_experts();
        let benchmark = self.conditional_expectation(full);
        let v_full = self.value(&benchmark);
        if v_full <= DEGENERACY_TOLERANCE {
            return Err(InfoError::DegenerateStructure { v_full });
        }
        let direct = self.value(z) / v_full;
        if self.is_measurable(z, full) {
            let prior_const = StateVariable::constant(self.prior, self.states.len());
            let denom = self.mean_squared_distance(&benchmark, &prior_const);
            let residual = 1.0 - self.mean_squared_distance(&benchmark, z) / denom;
            if (direct - residual).abs() > RATIO_CONSISTENCY_TOLERANCE {
                return Err(InfoError::InternalConsistency { direct, residual });
            }
        }
        Ok(direct)
    }

    /// Best affine predictor of `target` from `basis` in mean squared error:
    /// `E[target] + beta (basis - E[basis])` with `beta = Cov / Var`.
    ///
    /// When `Var(basis)` is at most [`DEGENERACY_TOLERANCE`] the constant
    /// `E[target]` is returned.
    pub fn affine_projection(
        &self,
        target: &StateVariable,
        basis: &StateVariable,
    ) -> StateVariable {
        self.assert_aligned(target);
        self.assert_aligned(basis);
        let mu_t = self.mean(target);
        let mu_b = self.mean(basis);
        let mut cov = 0.0;
        let mut var = 0.0;
        for (s, (t, b)) in self.states.iter().zip(target.values().iter().zip(basis.values())) {
            cov += s.prob * (t - mu_t) * (b - mu_b);
            var += s.prob * (b - mu_b) * (b - mu_b);
        }
        if var <= DEGENERACY_TOLERANCE {
            return StateVariable::constant(mu_t, self.states.len());
        }
        let beta = cov / var;
        let values = basis.values().iter().map(|b| mu_t + beta * (b - mu_b)).collect();
        StateVariable { values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(prob: f64, signals: &[&str], y: f64) -> State {
        State { prob, signals: signals.iter().map(|s| s.to_string()).collect(), y }
    }

    /// Two uniform bits; outcome is their parity.
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

    /// Two correlated bits; outcome is their sum.
    fn two_by_two() -> InfoStructure {
        InfoStructure::new(
            2,
            vec![
                state(0.3, &["0", "0"], 0.0),
                state(0.2, &["0", "1"], 1.0),
                state(0.2, &["1", "0"], 1.0),
                state(0.3, &["1", "1"], 2.0),
            ],
        )
        .unwrap()
    }

    fn assert_close(got: &StateVariable, want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.values().iter().zip(want) {
            assert!((g - w).abs() <= tol, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn conditional_expectation_on_xor_is_uninformative() {
        let info = xor();
        let one = info.conditional_expectation(SignalSubset::singleton(0, 2).unwrap());
        assert_close(&one, &[0.5, 0.5, 0.5, 0.5], 1e-15);
        let empty = info.conditional_expectation(SignalSubset::empty());
        assert_close(&empty, &[0.5, 0.5, 0.5, 0.5], 1e-15);
        let both = info.conditional_expectation(info.all_experts());
        assert_close(&both, &[0.0, 1.0, 1.0, 0.0], 1e-15);
    }

    #[test]
    fn forecasts_and_predictions_match_hand_computation() {
        let info = two_by_two();
        let a = SignalSubset::singleton(0, 2).unwrap();
        let b = SignalSubset::singleton(1, 2).unwrap();
        let yb = info.conditional_expectation(b);
        assert_close(&yb, &[0.4, 1.6, 0.4, 1.6], 1e-12);
        let yba = info.prediction(b, a);
        assert_close(&yba, &[0.88, 0.88, 1.12, 1.12], 1e-12);
        // Predicting a sub-coalition's forecast from a superset returns it
        // unchanged.
        let fixed = info.prediction(a, info.all_experts());
        let ya = info.conditional_expectation(a);
        assert_close(&fixed, ya.values(), 1e-15);
        // Predicting from nothing gives the prior.
        let from_nothing = info.prediction(b, SignalSubset::empty());
        assert_close(&from_nothing, &[1.0, 1.0, 1.0, 1.0], 1e-12);
    }

    #[test]
    fn mean_squared_distances_match_hand_computation() {
        let info = two_by_two();
        let a = SignalSubset::singleton(0, 2).unwrap();
        let b = SignalSubset::singleton(1, 2).unwrap();
        let ya = info.conditional_expectation(a);
        let yb = info.conditional_expectation(b);
        let yba = info.prediction(b, a);
        assert!((info.mean_squared_distance(&yb, &yba) - 0.3456).abs() < 1e-12);
        // Forecasts are [0.4, 0.4, 1.6, 1.6] and [0.4, 1.6, 0.4, 1.6]; the
        // two disagreeing states carry probability 0.2 each.
        assert!((info.mean_squared_distance(&ya, &yb) - 0.576).abs() < 1e-12);
        assert!((info.mean_squared_distance(&info.outcome(), &ya) - 0.24).abs() < 1e-12);
        assert_eq!(info.mean_squared_distance(&yb, &yb), 0.0);
    }

    #[test]
    fn value_measures_improvement_over_prior() {
        let info = xor();
        let a = SignalSubset::singleton(0, 2).unwrap();
        assert!(info.value(&info.conditional_expectation(a)).abs() < 1e-15);
        let joint = info.conditional_expectation(info.all_experts());
        assert!((info.value(&joint) - 0.25).abs() < 1e-15);
        // A constant at the prior has value exactly zero.
        let prior = StateVariable::constant(0.5, 4);
        assert_eq!(info.value(&prior), 0.0);
    }

    #[test]
    fn value_of_single_experts_in_two_by_two() {
        let info = two_by_two();
        let a = SignalSubset::singleton(0, 2).unwrap();
        let ya = info.conditional_expectation(a);
        assert!((info.value(&ya) - 0.36).abs() < 1e-12);
        let joint = info.conditional_expectation(info.all_experts());
        assert!((info.value(&joint) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn approximation_ratio_of_benchmark_is_one() {
        let info = two_by_two();
        let joint = info.conditional_expectation(info.all_experts());
        let r = info.approximation_ratio(&joint).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn approximation_ratio_of_averaging_in_two_by_two() {
        let info = two_by_two();
        let ya = info.conditional_expectation(SignalSubset::singleton(0, 2).unwrap());
        let yb = info.conditional_expectation(SignalSubset::singleton(1, 2).unwrap());
        let avg: Vec<f64> =
            ya.values().iter().zip(yb.values()).map(|(a, b)| (a + b) / 2.0).collect();
        let r = info.approximation_ratio(&StateVariable::new(avg).unwrap()).unwrap();
        assert!((r - 0.84).abs() < 1e-12, "got {r}");
    }

    #[test]
    fn approximation_ratio_of_prior_is_zero() {
        let info = xor();
        let r = info.approximation_ratio(&StateVariable::constant(0.5, 4)).unwrap();
        assert!(r.abs() < 1e-15);
    }

    #[test]
    fn approximation_ratio_rejects_degenerate_structures() {
        let info =
            InfoStructure::new(1, vec![state(0.5, &["0"], 1.0), state(0.5, &["1"], 1.0)]).unwrap();
        match info.approximation_ratio(&StateVariable::constant(1.0, 2)) {
            Err(InfoError::DegenerateStructure { .. }) => {}
            other => panic!("expected degeneracy error, got {other:?}"),
        }
    }

    #[test]
    fn affine_projection_recovers_exact_affine_relations() {
        let info = two_by_two();
        let a = SignalSubset::singleton(0, 2).unwrap();
        let b = SignalSubset::singleton(1, 2).unwrap();
        let ya = info.conditional_expectation(a);
        let yb = info.conditional_expectation(b);
        // With binary signals the prediction is affine in the basis expert's
        // forecast, so the affine projection reproduces it exactly.
        let t = info.affine_projection(&yb, &ya);
        assert_close(&t, &[0.88, 0.88, 1.12, 1.12], 1e-12);
        // Projecting a variable onto itself is the identity.
        let self_proj = info.affine_projection(&ya, &ya);
        assert_close(&self_proj, ya.values(), 1e-12);
    }

    #[test]
    fn affine_projection_is_no_better_than_conditional_expectation() {
        // Expert 0 has three signal values, so the conditional expectation is
        // not affine in expert 0's forecast and the affine fit is strictly
        // worse. Values frozen from an independent enumeration.
        let info = InfoStructure::new_renormalizing(
            2,
            vec![
                state(0.058665724881308466, &["0", "0"], 0.7843591354096908),
                state(0.4838857705370577, &["0", "1"], -0.8261223347411677),
                state(0.1693495647445801, &["1", "0"], -0.15615636062945915),
                state(0.19673686077701477, &["1", "1"], -0.9404055611238593),
                state(0.04012891259678415, &["2", "0"], -0.5627240503927933),
                state(0.05123316646325474, &["2", "1"], 0.010710576206724776),
            ],
        )
        .unwrap();
        let a = SignalSubset::singleton(0, 2).unwrap();
        let b = SignalSubset::singleton(1, 2).unwrap();
        let yb = info.conditional_expectation(b);
        let ya = info.conditional_expectation(a);
        let lhs = info.mean_squared_distance(&yb, &info.prediction(b, a));
        let rhs = info.mean_squared_distance(&yb, &info.affine_projection(&yb, &ya));
        assert!((lhs - 0.10272095288782118).abs() < 1e-12, "got {lhs}");
        assert!((rhs - 0.11514053759916218).abs() < 1e-12, "got {rhs}");
        assert!(lhs < rhs);
    }

    #[test]
    fn affine_projection_on_constant_basis_returns_target_mean() {
        let info = two_by_two();
        let target = info.outcome();
        let basis = StateVariable::constant(3.0, 4);
        let t = info.affine_projection(&target, &basis);
        assert_close(&t, &[1.0, 1.0, 1.0, 1.0], 1e-12);
    }

    #[test]
    fn pythagorean_decomposition_holds_on_xor() {
        let info = xor();
        let joint = info.conditional_expectation(info.all_experts());
        let z = StateVariable::constant(0.25, 4);
        let y = info.outcome();
        let total = info.mean_squared_distance(&y, &z);
        let through =
            info.mean_squared_distance(&y, &joint) + info.mean_squared_distance(&joint, &z);
        assert!((total - through).abs() < 1e-12);
    }

    #[test]
    fn construction_rejects_malformed_input() {
        assert_eq!(InfoStructure::new(0, vec![]).unwrap_err(), InfoError::ZeroExperts);
        assert_eq!(InfoStructure::new(1, vec![]).unwrap_err(), InfoError::EmptyStates);
        let err = InfoStructure::new(2, vec![state(1.0, &["0"], 0.0)]).unwrap_err();
        assert_eq!(err, InfoError::SignalArityMismatch { state: 0, expected: 2, got: 1 });
        let err = InfoStructure::new(1, vec![state(-0.5, &["0"], 0.0)]).unwrap_err();
        assert_eq!(err, InfoError::NonPositiveProb { state: 0, prob: -0.5 });
        let err = InfoStructure::new(1, vec![state(0.6, &["0"], 0.0), state(0.6, &["1"], 1.0)])
            .unwrap_err();
        assert!(matches!(err, InfoError::ProbSumMismatch { .. }));
    }

    #[test]
    fn renormalization_accepts_small_drift_and_rejects_large() {
        let drifted = vec![state(0.5000001, &["0"], 0.0), state(0.5, &["1"], 1.0)];
        assert!(matches!(
            InfoStructure::new(1, drifted.clone()).unwrap_err(),
            InfoError::ProbSumMismatch { .. }
        ));
        let info = InfoStructure::new_renormalizing(1, drifted).unwrap();
        let total: f64 = info.states().iter().map(|s| s.prob).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let way_off = vec![state(0.7, &["0"], 0.0), state(0.5, &["1"], 1.0)];
        assert!(matches!(
            InfoStructure::new_renormalizing(1, way_off).unwrap_err(),
            InfoError::ProbSumMismatch { .. }
        ));
    }

    #[test]
    fn subset_operations_behave_as_sets() {
        let a = SignalSubset::from_indices(&[0, 2], 4).unwrap();
        let b = SignalSubset::from_indices(&[1, 2], 4).unwrap();
        assert_eq!(a.union(b).indices(), vec![0, 1, 2]);
        assert_eq!(a.difference(b).indices(), vec![0]);
        assert!(a.is_subset_of(SignalSubset::full(4)));
        assert!(!a.is_subset_of(b));
        assert_eq!(a.with(1).indices(), vec![0, 1, 2]);
        assert!(SignalSubset::empty().is_empty());
        assert_eq!(
            SignalSubset::from_indices(&[5], 4).unwrap_err(),
            InfoError::ExpertOutOfRange { index: 5, n: 4 }
        );
    }

    #[test]
    fn state_variables_reject_non_finite_entries() {
        assert!(StateVariable::new(vec![0.0, f64::NAN]).is_err());
        assert!(StateVariable::new(vec![0.0, f64::INFINITY]).is_err());
        assert!(StateVariable::new(vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn instance_file_round_trips_through_json() {
        let info = two_by_two();
        let json = serde_json::to_string(&info.to_instance_file()).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&json).unwrap();
        let rebuilt = InfoStructure::from_instance_file(parsed).unwrap();
        assert_eq!(rebuilt.n_experts(), 2);
        assert_eq!(rebuilt.states(), info.states());
    }

    #[test]
    fn measurability_detects_cell_constancy() {
        let info = two_by_two();
        let a = SignalSubset::singleton(0, 2).unwrap();
        let ya = info.conditional_expectation(a);
        assert!(info.is_measurable(&ya, a));
        assert!(info.is_measurable(&ya, info.all_experts()));
        assert!(!info.is_measurable(&info.outcome(), a));
    }
}

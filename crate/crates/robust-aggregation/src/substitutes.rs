//! Certification of informational-substitutes conditions.
//!
//! Three related conditions are checked by exhaustive enumeration over
//! coalitions:
//!
//! * **Weak substitutes** — the squared-error value of coalitions'
//!   forecasts is submodular: an expert's marginal value to a coalition
//!   never grows as the coalition grows.
//! * **Projective substitutes** — the prediction loss
//!   `E[(Y_B - Y_{B->A})^2]` never increases when one expert joins both
//!   sides, for *all* pairs of coalitions `A, B` and experts `i`.
//! * **Restricted projective substitutes** — the same inequality quantified
//!   only over experts already in `A`; this is the exact strength needed for
//!   the signal-revelation dominance argument.
//!
//! Checks report the worst margin found, and every violating triple (up to a
//! cap) with enough data to recompute the inequality from the instance.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::info_core::{InfoStructure, Partition, SignalSubset, StateVariable};

/// Checks refuse structures with more experts than this; the triple
/// enumeration is exponential in the expert count.
pub const ENUMERATION_CAP: usize = 12;

/// At most this many violating witnesses are retained, worst first.
pub const WITNESS_CAP: usize = 100;

/// Default margin tolerance: a triple counts as a violation only when its
/// margin is below `-tolerance`.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Errors from the condition checkers.
#[derive(Debug, Error, PartialEq)]
pub enum SubstitutesError {
    /// The structure has too many experts to enumerate.
    #[error("{n} experts exceeds the enumeration cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },
}

/// Which condition a report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionKind {
    Weak,
    Projective,
    ProjectiveRestricted,
}

impl std::fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConditionKind::Weak => "weak",
            ConditionKind::Projective => "projective",
            ConditionKind::ProjectiveRestricted => "projective-restricted",
        };
        f.write_str(s)
    }
}

/// One enumerated triple with the two sides of its inequality.
///
/// For the weak condition, `lhs` and `rhs` are marginal values
/// `v(Y_{A+i}) - v(Y_A)` and `v(Y_{B+i}) - v(Y_B)`; for the projective
/// conditions they are the prediction losses of `(A, B)` and
/// `(A+i, B+i)`. In both cases the condition requires `lhs >= rhs`, so
/// `margin = lhs - rhs`.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub a: SignalSubset,
    pub b: SignalSubset,
    pub i: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Outcome of a condition check.
#[derive(Debug, Clone, Serialize)]
pub struct SubstitutesReport {
    /// Condition that was checked.
    pub condition: ConditionKind,
    /// Whether every margin is at least `-tolerance`.
    pub satisfied: bool,
    /// The smallest margin over all enumerated triples.
    pub worst_margin: f64,
    /// Tolerance the verdict used.
    pub tolerance: f64,
    /// Violating triples sorted by margin ascending (worst first), capped at
    /// [`WITNESS_CAP`]; when satisfied, the single worst triple.
    pub witnesses: Vec<Witness>,
}

/// All subsets of `0..n` ordered by cardinality, then lexicographically on
/// the sorted index list. This is the enumeration order used by every check.
pub fn subsets_in_order(n: usize) -> Vec<SignalSubset> {
    let mut all: Vec<SignalSubset> = (0u64..(1u64 << n)).map(SignalSubset::from_bits).collect();
    all.sort_by_key(|s| (s.len(), s.indices()));
    all
}

/// Shared machinery: per-mask partitions and forecasts, plus scratch
/// buffers for cellwise accumulation. Also used by the revelation check,
/// whose losses are the same quantities over a different index set.
pub(crate) struct LossEvaluator<'a> {
    info: &'a InfoStructure,
    partitions: Vec<Partition>,
    beliefs: Vec<StateVariable>,
    loss_memo: HashMap<(u64, u64), f64>,
    weight: Vec<f64>,
    sum: Vec<f64>,
}

impl<'a> LossEvaluator<'a> {
    pub(crate) fn new(info: &'a InfoStructure) -> Self {
        let n = info.n_experts();
        let mut partitions = Vec::with_capacity(1 << n);
        let mut beliefs = Vec::with_capacity(1 << n);
        for bits in 0u64..(1u64 << n) {
            let subset = SignalSubset::from_bits(bits);
            partitions.push(info.partition(subset));
            beliefs.push(info.conditional_expectation(subset));
        }
        LossEvaluator {
            info,
            partitions,
            beliefs,
            loss_memo: HashMap::new(),
            weight: Vec::new(),
            sum: Vec::new(),
        }
    }

    /// Prediction loss `E[(Y_b - Y_{b->a})^2]`.
    pub(crate) fn loss(&mut self, a: SignalSubset, b: SignalSubset) -> f64 {
        if let Some(&l) = self.loss_memo.get(&(a.bits(), b.bits())) {
            return l;
        }
        let partition = &self.partitions[a.bits() as usize];
        let yb = &self.beliefs[b.bits() as usize];
        let cells = partition.n_cells();
        self.weight.clear();
        self.weight.resize(cells, 0.0);
        self.sum.clear();
        self.sum.resize(cells, 0.0);
        for (i, s) in self.info.states().iter().enumerate() {
            let c = partition.cell_of(i);
            self.weight[c] += s.prob;
            self.sum[c] += s.prob * yb.get(i);
        }
        let mut loss = 0.0;
        for (i, s) in self.info.states().iter().enumerate() {
            let c = partition.cell_of(i);
            let mean = self.sum[c] / self.weight[c];
            let r = yb.get(i) - mean;
            loss += s.prob * r * r;
        }
        self.loss_memo.insert((a.bits(), b.bits()), loss);
        loss
    }
}

/// Accumulates the worst margin and the capped, deterministic witness list.
struct WitnessCollector {
    tolerance: f64,
    worst: Option<(f64, usize, Witness)>,
    violations: Vec<(f64, usize, Witness)>,
    counter: usize,
}

impl WitnessCollector {
    fn new(tolerance: f64) -> Self {
        WitnessCollector { tolerance, worst: None, violations: Vec::new(), counter: 0 }
    }

    fn visit(&mut self, a: SignalSubset, b: SignalSubset, i: usize, lhs: f64, rhs: f64) {
        let margin = lhs - rhs;
        let idx = self.counter;
        self.counter += 1;
        let make = || Witness { a, b, i, lhs, rhs, margin };
        match &self.worst {
            Some((m, _, _)) if *m <= margin => {}
            _ => self.worst = Some((margin, idx, make())),
        }
        if margin < -self.tolerance {
            self.violations.push((margin, idx, make()));
            if self.violations.len() > 4 * WITNESS_CAP {
                self.truncate();
            }
        }
    }

    fn truncate(&mut self) {
        self.violations
            .sort_by(|(ma, ia, _), (mb, ib, _)| ma.partial_cmp(mb).unwrap().then(ia.cmp(ib)));
        self.violations.truncate(WITNESS_CAP);
    }

    fn finish(mut self, condition: ConditionKind) -> SubstitutesReport {
        let (worst_margin, _, worst_witness) =
            self.worst.take().expect("at least one triple enumerated");
        let satisfied = self.violations.is_empty();
        let witnesses = if satisfied {
            vec![worst_witness]
        } else {
            self.truncate();
            self.violations.into_iter().map(|(_, _, w)| w).collect()
        };
        SubstitutesReport {
            condition,
            satisfied,
            worst_margin,
            tolerance: self.tolerance,
            witnesses,
        }
    }
}

fn guard_cap(info: &InfoStructure) -> Result<(), SubstitutesError> {
    let n = info.n_experts();
    if n > ENUMERATION_CAP {
        return Err(SubstitutesError::EnumerationCap { n, cap: ENUMERATION_CAP });
    }
    Ok(())
}

/// Checks the weak substitutes condition (submodular coalition value).
///
/// Enumerates every `A ⊆ B ⊆ {0..n}` and expert `i`; the margin of a triple
/// is `[v(Y_{A+i}) - v(Y_A)] - [v(Y_{B+i}) - v(Y_B)]`.
pub fn check_weak(
    info: &InfoStructure,
    tolerance: f64,
) -> Result<SubstitutesReport, SubstitutesError> {
    guard_cap(info)?;
    let n = info.n_experts();
    let mut values = vec![0.0; 1 << n];
    for bits in 0u64..(1u64 << n) {
        let belief = info.conditional_expectation(SignalSubset::from_bits(bits));
        values[bits as usize] = info.value(&belief);
    }
    let order = subsets_in_order(n);
    let mut collector = WitnessCollector::new(tolerance);
    for &a in &order {
        for &b in &order {
            if !a.is_subset_of(b) {
                continue;
            }
            for i in 0..n {
                let lhs = values[a.with(i).bits() as usize] - values[a.bits() as usize];
                let rhs = values[b.with(i).bits() as usize] - values[b.bits() as usize];
                collector.visit(a, b, i, lhs, rhs);
            }
        }
    }
    Ok(collector.finish(ConditionKind::Weak))
}

fn check_projective_impl(
    info: &InfoStructure,
    tolerance: f64,
    condition: ConditionKind,
) -> Result<SubstitutesReport, SubstitutesError> {
    guard_cap(info)?;
    let n = info.n_experts();
    let order = subsets_in_order(n);
    let mut evaluator = LossEvaluator::new(info);
    let mut collector = WitnessCollector::new(tolerance);
    let restricted = condition == ConditionKind::ProjectiveRestricted;
    for &a in &order {
        for &b in &order {
            for i in 0..n {
                if restricted && !a.contains(i) {
                    continue;
                }
                let lhs = evaluator.loss(a, b);
                let rhs = evaluator.loss(a.with(i), b.with(i));
                collector.visit(a, b, i, lhs, rhs);
            }
        }
    }
    Ok(collector.finish(condition))
}

/// Checks the projective substitutes condition over all `(A, B, i)`.
pub fn check_projective(
    info: &InfoStructure,
    tolerance: f64,
) -> Result<SubstitutesReport, SubstitutesError> {
    check_projective_impl(info, tolerance, ConditionKind::Projective)
}

/// Checks projective substitutes restricted to experts `i ∈ A`.
pub fn check_projective_restricted(
    info: &InfoStructure,
    tolerance: f64,
) -> Result<SubstitutesReport, SubstitutesError> {
    check_projective_impl(info, tolerance, ConditionKind::ProjectiveRestricted)
}

/// Verdict-only projective check that stops at the first violation.
///
/// Equivalent to `check_projective(..).satisfied` but much cheaper on
/// violating structures; rejection samplers lean on this.
pub fn satisfies_projective(
    info: &InfoStructure,
    tolerance: f64,
) -> Result<bool, SubstitutesError> {
    guard_cap(info)?;
    let n = info.n_experts();
    let order = subsets_in_order(n);
    let mut evaluator = LossEvaluator::new(info);
    for &a in &order {
        for &b in &order {
            for i in 0..n {
                let lhs = evaluator.loss(a, b);
                let rhs = evaluator.loss(a.with(i), b.with(i));
                if lhs - rhs < -tolerance {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

//! Signal-revelation dominance.
//!
//! Consider an expert `i` on a team `A ∋ i` that predicts the consensus
//! forecast of a pool of revealers `B ⊆ [n] \ {i}`. If `i` withholds their
//! signal from the pool, the team's squared prediction loss is
//! `E[(Y_B - Y_{B->A})²]`; if `i` reveals it, the pool grows and the loss
//! becomes `E[(Y_{B∪i} - Y_{B∪i -> A∪i})²]` (conditioning on `A ∪ {i} = A`
//! changes nothing since `i` is already on the team). Revelation is
//! *dominant* when revealing never hurts, for every such triple.
//!
//! These inequalities are exactly the projective-substitutes inequalities
//! restricted to `i ∈ A`, `i ∉ B`, so dominance holds on every structure
//! satisfying restricted projective substitutes and vice versa.

use serde::Serialize;

use crate::info_core::{InfoStructure, SignalSubset};
use crate::substitutes::{subsets_in_order, LossEvaluator, SubstitutesError, WITNESS_CAP};

/// One triple where revealing strictly hurts (or, on dominant structures,
/// the single worst triple).
#[derive(Debug, Clone, Serialize)]
pub struct RevelationWitness {
    /// The expert deciding whether to reveal.
    pub expert: usize,
    /// The team the expert belongs to (`team` contains `expert`).
    pub team: SignalSubset,
    /// The revealing pool, never containing `expert`.
    pub revealers: SignalSubset,
    /// Team loss when the expert reveals.
    pub loss_reveal: f64,
    /// Team loss when the expert withholds.
    pub loss_withhold: f64,
    /// `loss_withhold - loss_reveal`; negative margins are violations.
    pub margin: f64,
}

/// Outcome of the revelation-dominance check.
#[derive(Debug, Clone, Serialize)]
pub struct RevelationReport {
    /// Whether revealing is weakly better in every enumerated triple.
    pub dominant: bool,
    /// The smallest margin over all triples.
    pub worst_margin: f64,
    /// Tolerance the verdict used.
    pub tolerance: f64,
    /// Violating triples sorted by margin ascending (worst first), capped at
    /// [`WITNESS_CAP`]; when dominant, the single worst triple.
    pub witnesses: Vec<RevelationWitness>,
}

/// Checks whether revealing one's signal is a dominant choice on this
/// structure. Margins below `-tolerance` count as violations.
///
/// # Errors
/// [`SubstitutesError::EnumerationCap`] when the structure has too many
/// experts to enumerate.
pub fn check_revelation_dominance(
    info: &InfoStructure,
    tolerance: f64,
) -> Result<RevelationReport, SubstitutesError> {
    let n = info.n_experts();
    if n > crate::substitutes::ENUMERATION_CAP {
        return Err(SubstitutesError::EnumerationCap {
            n,
            cap: crate::substitutes::ENUMERATION_CAP,
        });
    }
    let order = subsets_in_order(n);
    let mut evaluator = LossEvaluator::new(info);

    let mut worst: Option<(f64, usize, RevelationWitness)> = None;
    let mut violations: Vec<(f64, usize, RevelationWitness)> = Vec::new();
    let mut counter = 0usize;
    let truncate = |violations: &mut Vec<(f64, usize, RevelationWitness)>| {
        violations.sort_by(|(ma, ia, _), (mb, ib, _)| ma.partial_cmp(mb).unwrap().then(ia.cmp(ib)));
        violations.truncate(WITNESS_CAP);
    };

    for expert in 0..n {
        for &team in order.iter().filter(|t| t.contains(expert)) {
            for &revealers in order.iter().filter(|r| !r.contains(expert)) {
                let loss_withhold = evaluator.loss(team, revealers);
                let loss_reveal = evaluator.loss(team, revealers.with(expert));
                let margin = loss_withhold - loss_reveal;
                let idx = counter;
                counter += 1;
                let make = || RevelationWitness {
                    expert,
                    team,
                    revealers,
                    loss_reveal,
                    loss_withhold,
                    margin,
                };
                match &worst {
                    Some((m, _, _)) if *m <= margin => {}
                    _ => worst = Some((margin, idx, make())),
                }
                if margin < -tolerance {
                    violations.push((margin, idx, make()));
                    if violations.len() > 4 * WITNESS_CAP {
                        truncate(&mut violations);
                    }
                }
            }
        }
    }

    let (worst_margin, _, worst_witness) = worst.expect("at least one triple enumerated");
    let dominant = violations.is_empty();
    let witnesses = if dominant {
        vec![worst_witness]
    } else {
        truncate(&mut violations);
        violations.into_iter().map(|(_, _, w)| w).collect()
    };
    Ok(RevelationReport { dominant, worst_margin, tolerance, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::substitutes::{check_projective_restricted, DEFAULT_TOLERANCE};

    #[test]
    fn revealing_dominates_on_benign_fixtures() {
        for info in [catalog::example_2x2(), catalog::same_bit_structure()] {
            let report = check_revelation_dominance(&info, DEFAULT_TOLERANCE).unwrap();
            assert!(report.dominant, "worst margin {}", report.worst_margin);
            assert_eq!(report.witnesses.len(), 1);
        }
    }

    #[test]
    fn withholding_pays_on_complement_structures() {
        let report =
            check_revelation_dominance(&catalog::xor_structure(), DEFAULT_TOLERANCE).unwrap();
        assert!(!report.dominant);
        assert!(report.worst_margin < -0.2);
        for w in &report.witnesses {
            assert!(w.loss_reveal > w.loss_withhold);
        }
    }

    #[test]
    fn witness_semantics_hold_and_losses_recompute() {
        let info = catalog::secret_sharing(3, 5).unwrap();
        let report = check_revelation_dominance(&info, DEFAULT_TOLERANCE).unwrap();
        assert!(!report.dominant);
        for w in &report.witnesses {
            assert!(w.team.contains(w.expert));
            assert!(!w.revealers.contains(w.expert));
            let yb = info.conditional_expectation(w.revealers);
            let pred = info.prediction(w.revealers, w.team);
            let withhold = info.mean_squared_distance(&yb, &pred);
            let pool = w.revealers.with(w.expert);
            let yb2 = info.conditional_expectation(pool);
            let pred2 = info.prediction(pool, w.team);
            let reveal = info.mean_squared_distance(&yb2, &pred2);
            assert!((withhold - w.loss_withhold).abs() < 1e-12);
            assert!((reveal - w.loss_reveal).abs() < 1e-12);
            assert!((w.margin - (w.loss_withhold - w.loss_reveal)).abs() < 1e-15);
        }
        for pair in report.witnesses.windows(2) {
            assert!(pair[0].margin <= pair[1].margin);
        }
    }

    #[test]
    fn dominance_matches_the_restricted_condition() {
        let fixtures = vec![
            catalog::xor_structure(),
            catalog::same_bit_structure(),
            catalog::example_2x2(),
            catalog::secret_sharing(2, 3).unwrap(),
            catalog::secret_sharing(3, 5).unwrap(),
            catalog::tight_structure(
                crate::aggregators::AggregationSetting::PriorFree,
                catalog::Sign::Plus,
            ),
        ];
        for info in fixtures {
            let dominance = check_revelation_dominance(&info, DEFAULT_TOLERANCE).unwrap();
            let restricted = check_projective_restricted(&info, DEFAULT_TOLERANCE).unwrap();
            assert_eq!(dominance.dominant, restricted.satisfied);
            assert!((dominance.worst_margin - restricted.worst_margin).abs() < 1e-12);
        }
    }

    #[test]
    fn enumeration_cap_applies() {
        let signals: Vec<String> = (0..13).map(|i| format!("s{i}")).collect();
        let info = crate::info_core::InfoStructure::new(
            13,
            vec![crate::info_core::State { prob: 1.0, signals, y: 0.0 }],
        )
        .unwrap();
        assert!(check_revelation_dominance(&info, DEFAULT_TOLERANCE).is_err());
    }
}

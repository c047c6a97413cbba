//! Sufficient admissibility tests that shrink `P_b(D)` to nothing.
//!
//! *Digit rule*: if a fixed digit `d` never occurs at position `r` of the
//! remaining triples but does occur elsewhere, balance forces every triple
//! containing `d` to have multiplicity zero; drop them all.
//!
//! *Matrix rule*: in the reduced row echelon form of `A`, a nonzero row
//! whose entries share one sign forces the variables of its nonzero
//! entries to zero; drop those columns, recompute the echelon form of what
//! is left and repeat.
//!
//! Either rule reaching the empty set proves the cone `{χ >= 0 : Aχ = 0}`
//! is trivial for that equation.

use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, Matrix};
use crate::progressions::{build_constraint_system, enumerate_progressions, ConstraintSystem, ProgressionTable, WeightedProgression};
use crate::zp::{equation_classes, DigitSetPair, LineEquation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ReducedToEmpty,
    Stuck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitStep {
    /// 1-based position that the digit is missing from.
    pub position: usize,
    pub digit: u32,
    pub removed: Vec<WeightedProgression>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitTrace {
    pub equation: LineEquation,
    pub steps: Vec<DigitStep>,
    pub remaining: Vec<WeightedProgression>,
    pub verdict: Verdict,
}

/// Whether `(position, digit)` may fire on `rows`.
pub fn digit_rule_applies(rows: &[WeightedProgression], fixed: &[u32], position: usize, digit: u32) -> bool {
    fixed.contains(&digit) && rows.iter().all(|v| v.at(position) != digit) && rows.iter().any(|v| v.contains(digit))
}

fn applicable_rules(rows: &[WeightedProgression], fixed: &[u32]) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for position in 1..=3 {
        for &d in fixed {
            if digit_rule_applies(rows, fixed, position, d) {
                out.push((position, d));
            }
        }
    }
    out
}

/// Runs the digit rule to its fixpoint; `choose` picks which of the
/// currently applicable `(position, digit)` rules fires.
pub fn digit_reduce_with<F>(table: &ProgressionTable, mut choose: F) -> DigitTrace
where
    F: FnMut(&[(usize, u32)]) -> usize,
{
    let fixed = table.pair.fixed();
    let mut rows = table.rows.clone();
    let mut steps = Vec::new();
    loop {
        let rules = applicable_rules(&rows, fixed);
        if rules.is_empty() {
            break;
        }
        let (position, digit) = rules[choose(&rules)];
        let (removed, kept): (Vec<_>, Vec<_>) = rows.into_iter().partition(|v| v.contains(digit));
        rows = kept;
        steps.push(DigitStep { position, digit, removed });
    }
    let verdict = if rows.is_empty() { Verdict::ReducedToEmpty } else { Verdict::Stuck };
    DigitTrace { equation: table.equation, steps, remaining: rows, verdict }
}

/// Deterministic order: positions 1, 2, 3 outer, digits ascending inner,
/// first applicable rule fires, then the scan restarts.
pub fn digit_reduce_table(table: &ProgressionTable) -> DigitTrace {
    digit_reduce_with(table, |_| 0)
}

pub fn digit_reduce(pair: &DigitSetPair, eq: LineEquation) -> DigitTrace {
    digit_reduce_table(&enumerate_progressions(pair, eq))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("step {step}: digit {digit} cannot be removed via position {position}")]
    NotApplicable { step: usize, position: usize, digit: u32 },
    #[error("step {step}: recorded removals differ from the replay")]
    RemovedMismatch { step: usize },
    #[error("final state differs from the recorded one")]
    FinalStateMismatch,
    #[error("verdict does not match the final state")]
    VerdictMismatch,
    #[error("step {step}: row {row} is not a nonzero single-signed row")]
    RowNotSigned { step: usize, row: usize },
    #[error("step {step}: eliminated columns differ from the row's support")]
    ColumnsMismatch { step: usize },
    #[error("trace stops while another rule still applies")]
    NotAFixpoint,
    #[error("trace belongs to a different equation or system")]
    WrongInstance,
}

/// Applies an arbitrary sequence of `(position, digit)` removals, checking
/// that each one is allowed when it fires. Returns what is left.
pub fn replay_digit_steps(table: &ProgressionTable, steps: &[(usize, u32)]) -> Result<Vec<WeightedProgression>, ReplayError> {
    let fixed = table.pair.fixed();
    let mut rows = table.rows.clone();
    for (i, &(position, digit)) in steps.iter().enumerate() {
        if !(1..=3).contains(&position) || !digit_rule_applies(&rows, fixed, position, digit) {
            return Err(ReplayError::NotApplicable { step: i, position, digit });
        }
        rows.retain(|v| !v.contains(digit));
    }
    Ok(rows)
}

impl DigitTrace {
    /// Replays the steps on `table` and checks every recorded field.
    pub fn verify(&self, table: &ProgressionTable) -> Result<(), ReplayError> {
        if table.equation != self.equation {
            return Err(ReplayError::WrongInstance);
        }
        let fixed = table.pair.fixed();
        let mut rows = table.rows.clone();
        for (i, step) in self.steps.iter().enumerate() {
            if !(1..=3).contains(&step.position) || !digit_rule_applies(&rows, fixed, step.position, step.digit) {
                return Err(ReplayError::NotApplicable { step: i, position: step.position, digit: step.digit });
            }
            let (removed, kept): (Vec<_>, Vec<_>) = rows.into_iter().partition(|v| v.contains(step.digit));
            if removed != step.removed {
                return Err(ReplayError::RemovedMismatch { step: i });
            }
            rows = kept;
        }
        if rows != self.remaining {
            return Err(ReplayError::FinalStateMismatch);
        }
        if (self.verdict == Verdict::ReducedToEmpty) != rows.is_empty() {
            return Err(ReplayError::VerdictMismatch);
        }
        if self.verdict == Verdict::Stuck && !applicable_rules(&rows, fixed).is_empty() {
            return Err(ReplayError::NotAFixpoint);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixStep {
    /// Echelon recomputation this step belongs to, from 0.
    pub round: usize,
    /// 0-based row index in that round's reduced echelon form.
    pub row: usize,
    /// 0-based indices into the original columns.
    pub eliminated: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixTrace {
    pub equation: LineEquation,
    pub columns: usize,
    pub steps: Vec<MatrixStep>,
    pub remaining: Vec<usize>,
    pub verdict: Verdict,
}

fn submatrix(full: &Matrix, active: &[usize]) -> Matrix {
    full.iter().map(|row| active.iter().map(|&j| row[j].clone()).collect()).collect()
}

/// Rows of the echelon form of the active submatrix that are nonzero and
/// single-signed, with their support as original column indices.
fn signed_rows(full: &Matrix, active: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let mut sub = submatrix(full, active);
    linalg::rref(&mut sub);
    sub.iter()
        .enumerate()
        .filter(|(_, row)| linalg::single_signed(row).is_some())
        .map(|(i, row)| {
            let support = row.iter().zip(active).filter(|(v, _)| !v.is_zero()).map(|(_, &j)| j).collect();
            (i, support)
        })
        .collect()
}

/// Matrix reduction on the exact rational echelon form. Within a round all
/// signed rows fire in index order; each records the columns it newly
/// removes. The echelon form of the surviving columns is then recomputed.
pub fn matrix_reduce(system: &ConstraintSystem) -> MatrixTrace {
    let full = linalg::from_integers(&system.matrix);
    let mut active: Vec<usize> = (0..system.cols()).collect();
    let mut steps = Vec::new();
    let mut round = 0;
    while !active.is_empty() {
        let fired = signed_rows(&full, &active);
        if fired.is_empty() {
            break;
        }
        let mut removed = BTreeSet::new();
        for (row, support) in fired {
            let eliminated: Vec<usize> = support.into_iter().filter(|j| !removed.contains(j)).collect();
            if eliminated.is_empty() {
                continue;
            }
            removed.extend(eliminated.iter().copied());
            steps.push(MatrixStep { round, row, eliminated });
        }
        active.retain(|j| !removed.contains(j));
        round += 1;
    }
    let verdict = if active.is_empty() { Verdict::ReducedToEmpty } else { Verdict::Stuck };
    MatrixTrace { equation: system.equation, columns: system.cols(), steps, remaining: active, verdict }
}

impl MatrixTrace {
    /// Recomputes each round's echelon form and checks that every fired row
    /// is single-signed and removes exactly its not-yet-removed support.
    pub fn verify(&self, system: &ConstraintSystem) -> Result<(), ReplayError> {
        if system.equation != self.equation || system.cols() != self.columns {
            return Err(ReplayError::WrongInstance);
        }
        let full = linalg::from_integers(&system.matrix);
        let mut active: Vec<usize> = (0..system.cols()).collect();
        let mut i = 0;
        let mut round = 0;
        while i < self.steps.len() {
            if self.steps[i].round != round {
                return Err(ReplayError::WrongInstance);
            }
            let signed = signed_rows(&full, &active);
            let mut removed = BTreeSet::new();
            while i < self.steps.len() && self.steps[i].round == round {
                let step = &self.steps[i];
                let Some((_, support)) = signed.iter().find(|(r, _)| *r == step.row) else {
                    return Err(ReplayError::RowNotSigned { step: i, row: step.row });
                };
                let expected: Vec<usize> = support.iter().copied().filter(|j| !removed.contains(j)).collect();
                if expected.is_empty() || expected != step.eliminated {
                    return Err(ReplayError::ColumnsMismatch { step: i });
                }
                removed.extend(expected);
                i += 1;
            }
            active.retain(|j| !removed.contains(j));
            round += 1;
        }
        if active != self.remaining {
            return Err(ReplayError::FinalStateMismatch);
        }
        if (self.verdict == Verdict::ReducedToEmpty) != active.is_empty() {
            return Err(ReplayError::VerdictMismatch);
        }
        if self.verdict == Verdict::Stuck && !signed_rows(&full, &active).is_empty() {
            return Err(ReplayError::NotAFixpoint);
        }
        Ok(())
    }
}

pub fn matrix_reduce_pair(pair: &DigitSetPair, eq: LineEquation) -> MatrixTrace {
    matrix_reduce(&build_constraint_system(&enumerate_progressions(pair, eq)))
}

/// Outcome of running one test on every equation-class representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReduction<T> {
    pub reducible: bool,
    pub traces: Vec<T>,
}

fn over_representatives<T: Send>(pair: &DigitSetPair, run: impl Fn(LineEquation) -> T + Sync, ok: impl Fn(&T) -> bool) -> PairReduction<T> {
    let reps: Vec<LineEquation> = equation_classes(pair.p()).representatives().collect();
    let traces: Vec<T> = reps.into_par_iter().map(&run).collect();
    PairReduction { reducible: traces.iter().all(ok), traces }
}

pub fn digit_reducible(pair: &DigitSetPair) -> PairReduction<DigitTrace> {
    over_representatives(pair, |eq| digit_reduce(pair, eq), |t| t.verdict == Verdict::ReducedToEmpty)
}

pub fn matrix_reducible(pair: &DigitSetPair) -> PairReduction<MatrixTrace> {
    over_representatives(pair, |eq| matrix_reduce_pair(pair, eq), |t| t.verdict == Verdict::ReducedToEmpty)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Reduction {
    Digit(DigitTrace),
    Matrix(MatrixTrace),
}

/// Per representative, the first of digit or matrix reduction that closes
/// it, or `None` when both get stuck.
pub fn combined_reducible(pair: &DigitSetPair) -> PairReduction<(LineEquation, Option<Reduction>)> {
    over_representatives(
        pair,
        |eq| {
            let table = enumerate_progressions(pair, eq);
            let digit = digit_reduce_table(&table);
            if digit.verdict == Verdict::ReducedToEmpty {
                return (eq, Some(Reduction::Digit(digit)));
            }
            let matrix = matrix_reduce(&build_constraint_system(&table));
            if matrix.verdict == Verdict::ReducedToEmpty {
                return (eq, Some(Reduction::Matrix(matrix)));
            }
            (eq, None)
        },
        |(_, r)| r.is_some(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progressions::golden::*;
    use crate::zp::Prime;

    fn pair(p: u32, d: &[u32], fixed: &[u32]) -> DigitSetPair {
        DigitSetPair::new(Prime::new(p).unwrap(), d, fixed).unwrap()
    }

    fn eq_k(p: u32, k: u32) -> LineEquation {
        LineEquation::new(Prime::new(p).unwrap(), p - 1 - k).unwrap()
    }

    fn wp(t: [u32; 3]) -> WeightedProgression {
        WeightedProgression(t)
    }

    #[test]
    fn digit_trace_for_11() {
        let pr = pair(11, P11_D, P11_FIXED);
        let trace = digit_reduce(&pr, eq_k(11, 1));
        assert_eq!(trace.verdict, Verdict::ReducedToEmpty);
        assert_eq!(trace.steps.len(), 2);
        assert_eq!((trace.steps[0].position, trace.steps[0].digit), (2, 1));
        assert_eq!(trace.steps[0].removed, vec![wp([1, 3, 5]), wp([5, 3, 1])]);
        assert_eq!((trace.steps[1].position, trace.steps[1].digit), (2, 3));
        assert_eq!(trace.steps[1].removed, vec![wp([3, 4, 5]), wp([5, 4, 3])]);
        trace.verify(&enumerate_progressions(&pr, eq_k(11, 1))).unwrap();
    }

    #[test]
    fn digit_trace_for_17() {
        let pr = pair(17, P17_D, P17_FIXED);
        let table = enumerate_progressions(&pr, eq_k(17, 2));
        let trace = digit_reduce_table(&table);
        assert_eq!(trace.verdict, Verdict::ReducedToEmpty);
        let fired: Vec<(usize, u32)> = trace.steps.iter().map(|s| (s.position, s.digit)).collect();
        assert_eq!(&fired[..3], &[(1, 0), (2, 8), (2, 4)]);
        trace.verify(&table).unwrap();
        // The hand proof ends with digit 1 missing from position 3; that
        // order is also a valid run of the rule.
        let rest = replay_digit_steps(&table, &[(1, 0), (2, 8), (2, 4), (3, 1)]).unwrap();
        assert!(rest.is_empty());
        assert!(replay_digit_steps(&table, &[(1, 1)]).is_err());
    }

    #[test]
    fn hand_proofs_replay() {
        // Each printed case, as the sequence of removals narrated for it.
        let pr = pair(17, P17_D, P17_FIXED);
        let ap = enumerate_progressions(&pr, eq_k(17, 1));
        let after8 = replay_digit_steps(&ap, &[(2, 8)]).unwrap();
        assert_eq!(after8.len(), 10);
        let after4 = replay_digit_steps(&ap, &[(2, 8), (2, 4)]).unwrap();
        assert_eq!(after4.len(), 6);
        assert!(replay_digit_steps(&ap, &[(2, 8), (2, 4), (2, 0)]).unwrap().is_empty());

        let c3 = enumerate_progressions(&pr, eq_k(17, 3));
        let after0 = replay_digit_steps(&c3, &[(1, 0)]).unwrap();
        assert_eq!(after0.len(), 8);
        let last = replay_digit_steps(&c3, &[(1, 0), (1, 2), (1, 4)]).unwrap();
        assert_eq!(last, vec![wp([8, 13, 9])]);
        assert!(replay_digit_steps(&c3, &[(1, 0), (1, 2), (1, 4), (2, 8)]).unwrap().is_empty());

        let p11 = pair(11, P11_D, P11_FIXED);
        let t = enumerate_progressions(&p11, eq_k(11, 2));
        assert!(replay_digit_steps(&t, &[(1, 0), (3, 1)]).unwrap().is_empty());
    }

    #[test]
    fn empty_table_is_reduced() {
        let pr = pair(11, &[0, 1], &[0, 1]);
        for b in 1..10 {
            let eq = LineEquation::new(Prime::new(11).unwrap(), b).unwrap();
            let t = enumerate_progressions(&pr, eq);
            if t.is_empty() {
                let trace = digit_reduce_table(&t);
                assert!(trace.steps.is_empty());
                assert_eq!(trace.verdict, Verdict::ReducedToEmpty);
                let m = matrix_reduce(&build_constraint_system(&t));
                assert!(m.steps.is_empty());
                assert_eq!(m.verdict, Verdict::ReducedToEmpty);
            }
        }
    }

    #[test]
    fn record_pairs_reducibility() {
        assert!(digit_reducible(&pair(11, P11_D, P11_FIXED)).reducible);
        assert!(matrix_reducible(&pair(11, P11_D, P11_FIXED)).reducible);
        let p17 = pair(17, P17_D, P17_FIXED);
        assert!(digit_reducible(&p17).reducible);
        assert!(!matrix_reducible(&p17).reducible);
        let p23 = pair(23, P23_D, P23_D);
        assert!(matrix_reducible(&p23).reducible);
    }

    #[test]
    fn matrix_trace_for_23() {
        let pr = pair(23, P23_D, P23_D);
        let sys = build_constraint_system(&enumerate_progressions(&pr, eq_k(23, 1)));
        let trace = matrix_reduce(&sys);
        assert_eq!(trace.verdict, Verdict::ReducedToEmpty);
        let first: Vec<&MatrixStep> = trace.steps.iter().filter(|s| s.round == 0).collect();
        let rows: Vec<usize> = first.iter().map(|s| s.row + 1).collect();
        assert_eq!(rows, vec![8, 12, 14, 15]);
        let mut cols: Vec<usize> = first.iter().flat_map(|s| s.eliminated.iter().map(|j| j + 1)).collect();
        cols.sort_unstable();
        assert_eq!(cols, vec![8, 12, 16, 17, 18, 20]);
        trace.verify(&sys).unwrap();

        let mut bad = trace.clone();
        bad.steps[0].eliminated.push(0);
        assert!(bad.verify(&sys).is_err());
        let mut bad = trace.clone();
        bad.steps.pop();
        assert!(bad.verify(&sys).is_err());
    }

    #[test]
    fn fired_rows_are_sound() {
        let pr = pair(17, P17_D, P17_FIXED);
        for eq in equation_classes(pr.p()).representatives() {
            let sys = build_constraint_system(&enumerate_progressions(&pr, eq));
            let trace = matrix_reduce(&sys);
            trace.verify(&sys).unwrap();
        }
    }

    #[test]
    fn combined_needs_both_tests() {
        // Neither test alone closes every representative; together they do.
        let pr = pair(17, &[0, 1, 2, 3, 4, 6, 10], &[0, 1, 4, 6, 10]);
        assert!(!digit_reducible(&pr).reducible);
        assert!(!matrix_reducible(&pr).reducible);
        let combined = combined_reducible(&pr);
        assert!(combined.reducible);
        let kinds: Vec<&str> = combined
            .traces
            .iter()
            .map(|(_, r)| match r {
                Some(Reduction::Digit(_)) => "digit",
                Some(Reduction::Matrix(_)) => "matrix",
                None => "none",
            })
            .collect();
        assert!(kinds.contains(&"digit") && kinds.contains(&"matrix"), "{kinds:?}");
        assert!(crate::cone::admissible(&pr).admissible);
    }
}

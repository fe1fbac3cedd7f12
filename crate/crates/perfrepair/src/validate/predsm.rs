//! Predicted-smaller check: the patch must not increase any loop's
//! iteration bound and must strictly decrease at least one, judged by the
//! counter upper bounds observed at program exit on the same inputs.

use crate::exec::ProgramPoint;
use crate::invariants::{InvariantForm, InvariantSet};
use crate::lang::{counter_name, Label};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PredSmError {
    #[error("no exit bound for counter `{0}` in the original invariant set")]
    MissingCounter(String),
}

#[derive(Debug, Clone)]
pub struct PredSmReport {
    pub smaller: bool,
    /// Per loop label: (original bound, patched bound).
    pub bounds: Vec<(Label, i64, i64)>,
}

/// Tightest upper bound on `var` at exit, from `v <= c` and `v == c` members.
fn exit_bound(set: &InvariantSet, var: &str) -> Option<i64> {
    set.at_point(&ProgramPoint::Exit)
        .iter()
        .filter_map(|f| match f {
            InvariantForm::LeConst { var: v, c } | InvariantForm::EqConst { var: v, c }
                if v == var =>
            {
                Some(*c)
            }
            _ => None,
        })
        .min()
}

/// Compares counter exit bounds per loop of the original program. A counter
/// with no bound on the patched side means the loop never contributed an
/// iteration (for instance, the patch deleted it): its bound is 0.
pub fn pred_sm(
    original: &InvariantSet,
    patched: &InvariantSet,
    labels: &[Label],
) -> Result<PredSmReport, PredSmError> {
    let mut bounds = Vec::new();
    let mut all_le = true;
    let mut any_lt = false;
    for label in labels {
        let cnt = counter_name(label);
        let orig = exit_bound(original, &cnt).ok_or_else(|| PredSmError::MissingCounter(cnt.clone()))?;
        let new = exit_bound(patched, &cnt).unwrap_or(0);
        all_le &= new <= orig;
        any_lt |= new < orig;
        bounds.push((label.clone(), orig, new));
    }
    Ok(PredSmReport { smaller: all_le && any_lt, bounds })
}

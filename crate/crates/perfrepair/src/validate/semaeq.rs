//! Semantic equivalence check: two programs are accepted as equivalent when
//! the functional invariants inferred from running them on the same inputs
//! entail each other at every program point.

use crate::exec::ProgramPoint;
use crate::invariants::{forms_imply, Invariant, InvariantSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Original,
    Patched,
}

#[derive(Debug, Clone)]
pub struct SemaEqReport {
    pub equivalent: bool,
    /// Points visited by one program but not the other.
    pub missing_points: Vec<(Side, ProgramPoint)>,
    /// Invariants of one side the other side's set does not entail.
    pub unentailed: Vec<(Side, Invariant)>,
}

/// Mutual entailment of the functional (counter-free) invariants, point by
/// point. Both sets must come from runs over the same inputs for the verdict
/// to be meaningful.
pub fn sema_eq(original: &InvariantSet, patched: &InvariantSet) -> SemaEqReport {
    let a = original.functional_only();
    let b = patched.functional_only();
    let mut missing_points = Vec::new();
    let mut unentailed = Vec::new();

    let mut points = a.points();
    for p in b.points() {
        if !points.contains(&p) {
            points.push(p);
        }
    }
    points.sort();

    for point in &points {
        let fa = a.at_point(point);
        let fb = b.at_point(point);
        match (fa.is_empty(), fb.is_empty()) {
            (true, false) => {
                missing_points.push((Side::Original, point.clone()));
                continue;
            }
            (false, true) => {
                missing_points.push((Side::Patched, point.clone()));
                continue;
            }
            _ => {}
        }
        for form in &fa {
            if !forms_imply(&fb, form) {
                unentailed.push((
                    Side::Original,
                    Invariant { point: point.clone(), form: form.clone(), support: 0 },
                ));
            }
        }
        for form in &fb {
            if !forms_imply(&fa, form) {
                unentailed.push((
                    Side::Patched,
                    Invariant { point: point.clone(), form: form.clone(), support: 0 },
                ));
            }
        }
    }

    SemaEqReport {
        equivalent: missing_points.is_empty() && unentailed.is_empty(),
        missing_points,
        unentailed,
    }
}

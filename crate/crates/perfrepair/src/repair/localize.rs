//! Fault localization: statements are weighted by how many violated
//! invariants they can plausibly influence, either by writing one of the
//! invariant's functional variables or by sitting in the scope of the loop
//! whose counter the invariant bounds.

use crate::invariants::InvariantSet;
use crate::lang::{LValue, Program, Stmt, StmtId, StmtKind, COUNTER_PREFIX};
use std::collections::BTreeSet;

/// Minimum share of the maximum score every statement keeps, so the search
/// can still mutate statements the localizer missed.
const FLOOR_FRACTION: f64 = 0.05;

struct StmtInfo {
    id: StmtId,
    /// Variables written anywhere in the statement's subtree.
    writes: BTreeSet<String>,
    /// Loop labels that enclose the statement, are inside its subtree, or
    /// are inside its innermost enclosing loop.
    labels: BTreeSet<String>,
}

fn subtree_writes(s: &Stmt, out: &mut BTreeSet<String>) {
    match &s.kind {
        StmtKind::Assign { target, .. } | StmtKind::Read { target } => {
            if let LValue::Var(v) = target {
                out.insert(v.clone());
            }
        }
        StmtKind::If { then_branch, else_branch, .. } => {
            for c in then_branch.iter().chain(else_branch) {
                subtree_writes(c, out);
            }
        }
        StmtKind::While { body, .. } => {
            for c in body {
                subtree_writes(c, out);
            }
        }
        _ => {}
    }
}

fn subtree_labels(s: &Stmt, out: &mut BTreeSet<String>) {
    match &s.kind {
        StmtKind::If { then_branch, else_branch, .. } => {
            for c in then_branch.iter().chain(else_branch) {
                subtree_labels(c, out);
            }
        }
        StmtKind::While { label, body, .. } => {
            out.insert(label.clone());
            for c in body {
                subtree_labels(c, out);
            }
        }
        _ => {}
    }
}

fn collect(stmts: &[Stmt], ancestors: &[&Stmt], out: &mut Vec<StmtInfo>) {
    for s in stmts {
        let mut writes = BTreeSet::new();
        subtree_writes(s, &mut writes);
        let mut labels = BTreeSet::new();
        subtree_labels(s, &mut labels);
        for a in ancestors {
            if let StmtKind::While { label, .. } = &a.kind {
                labels.insert(label.clone());
            }
        }
        // Everything inside the innermost enclosing loop is fair game: moving
        // this statement can change any of those loops' trip counts.
        if let Some(innermost) = ancestors
            .iter()
            .rev()
            .find(|a| matches!(a.kind, StmtKind::While { .. }))
        {
            subtree_labels(innermost, &mut labels);
        }
        out.push(StmtInfo { id: s.id, writes, labels });
        let nested: Vec<&Stmt> = ancestors.iter().copied().chain(std::iter::once(s)).collect();
        match &s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                collect(then_branch, &nested, out);
                collect(else_branch, &nested, out);
            }
            StmtKind::While { body, .. } => collect(body, &nested, out),
            _ => {}
        }
    }
}

/// Normalized sampling weights over all statements, keyed by statement id in
/// ascending order. An empty violated set yields a uniform distribution.
pub fn localize(p: &Program, violated: &InvariantSet) -> Vec<(StmtId, f64)> {
    let mut infos = Vec::new();
    collect(&p.body, &[], &mut infos);
    if infos.is_empty() {
        return Vec::new();
    }

    let scores: Vec<f64> = infos
        .iter()
        .map(|info| {
            violated
                .iter()
                .filter(|inv| {
                    inv.form.vars().iter().any(|v| match v.strip_prefix(COUNTER_PREFIX) {
                        Some(suffix) => {
                            info.labels.contains(&format!("L{suffix}"))
                                || info.labels.contains(suffix)
                        }
                        None => info.writes.contains(*v),
                    })
                })
                .count() as f64
        })
        .collect();

    let max = scores.iter().cloned().fold(0.0f64, f64::max);
    let base = FLOOR_FRACTION * max.max(1.0);
    let weighted: Vec<f64> = scores.iter().map(|s| s + base).collect();
    let total: f64 = weighted.iter().sum();
    let mut out: Vec<(StmtId, f64)> =
        infos.iter().zip(&weighted).map(|(info, w)| (info.id, w / total)).collect();
    out.sort_by_key(|(id, _)| *id);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::ProgramPoint;
    use crate::invariants::{InvariantForm, InvariantSet, Provenance};
    use crate::lang::parse;

    const NESTED: &str = "proc t(n: int) -> s {\n\
        s := 0;\n\
        k := 0;\n\
        while L1 (k < n) {\n\
          x := 0;\n\
          while L2 (x < k) {\n\
            s := s + 1;\n\
            x := x + 1;\n\
          }\n\
          k := k + 1;\n\
        }\n\
      }";

    #[test]
    fn empty_spec_is_uniform() {
        let p = parse(NESTED).unwrap();
        let w = localize(&p, &InvariantSet::new(Provenance::FromFailing));
        assert_eq!(w.len(), p.stmt_count());
        for (_, wi) in &w {
            assert!((wi - 1.0 / w.len() as f64).abs() < 1e-12);
        }
        let total: f64 = w.iter().map(|(_, wi)| wi).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counter_violations_point_into_the_loop() {
        let p = parse(NESTED).unwrap();
        let mut v = InvariantSet::new(Provenance::FromFailing);
        v.insert(
            ProgramPoint::Exit,
            InvariantForm::LeConst { var: "cnt_2".into(), c: 10 },
            3,
        );
        let w = localize(&p, &v);
        let weight = |id: u32| w.iter().find(|(s, _)| s.0 == id).unwrap().1;
        // Statement 4 is `x := 0` inside L1; statement 1 is `s := 0` outside.
        assert!(weight(4) > weight(1));
        // The L1 while (id 3) contains L2, so it is suspicious too.
        assert!(weight(3) > weight(1));
    }

    #[test]
    fn write_violations_point_at_writers() {
        let p = parse(NESTED).unwrap();
        let mut v = InvariantSet::new(Provenance::FromFailing);
        v.insert(ProgramPoint::Exit, InvariantForm::EqConst { var: "k".into(), c: 0 }, 3);
        let w = localize(&p, &v);
        let weight = |id: u32| w.iter().find(|(s, _)| s.0 == id).unwrap().1;
        // k is written by statement 2 (k := 0) and 8 (k := k + 1).
        assert!(weight(2) > weight(1));
        assert!(weight(8) > weight(1));
    }
}

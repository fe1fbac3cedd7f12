//! Single-pass inference: for every program point visited by at least one
//! trace, emit every grammar instance that holds on all samples at that
//! point, with constants tightened to the observed extremes.

use super::{InvariantError, InvariantForm, InvariantSet, Provenance};
use crate::exec::Trace;

/// Per-variable and per-pair running statistics at one program point.
struct PointStats {
    support: u32,
    min: Vec<i64>,
    max: Vec<i64>,
    /// For i < j (slot order): constant difference v_i - v_j if stable.
    diff: Vec<Option<i128>>,
    le_ij: Vec<bool>,
    le_ji: Vec<bool>,
}

impl PointStats {
    fn new(values: &[i64]) -> PointStats {
        let n = values.len();
        let pairs = n * (n.saturating_sub(1)) / 2;
        let mut s = PointStats {
            support: 0,
            min: values.to_vec(),
            max: values.to_vec(),
            diff: vec![None; pairs],
            le_ij: vec![true; pairs],
            le_ji: vec![true; pairs],
        };
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                let d = values[i] as i128 - values[j] as i128;
                s.diff[k] = Some(d);
                s.le_ij[k] = d <= 0;
                s.le_ji[k] = d >= 0;
                k += 1;
            }
        }
        s.support = 1;
        s
    }

    fn add(&mut self, values: &[i64]) {
        self.support += 1;
        let n = values.len();
        let mut k = 0;
        for i in 0..n {
            self.min[i] = self.min[i].min(values[i]);
            self.max[i] = self.max[i].max(values[i]);
            for j in i + 1..n {
                let d = values[i] as i128 - values[j] as i128;
                if self.diff[k] != Some(d) {
                    self.diff[k] = None;
                }
                if d > 0 {
                    self.le_ij[k] = false;
                }
                if d < 0 {
                    self.le_ji[k] = false;
                }
                k += 1;
            }
        }
    }
}

/// Infers the likely-invariant set from a non-empty group of traces sharing
/// one variable schema.
pub fn infer(traces: &[Trace], provenance: Provenance) -> Result<InvariantSet, InvariantError> {
    let mut vars: Option<&[String]> = None;
    let mut stats: Vec<(crate::exec::ProgramPoint, PointStats)> = Vec::new();
    let mut any_record = false;
    for t in traces {
        match vars {
            None => vars = Some(&t.vars),
            Some(v) if v == t.vars.as_slice() => {}
            Some(_) => return Err(InvariantError::SchemaMismatch),
        }
        for (point, values) in &t.records {
            any_record = true;
            match stats.iter_mut().find(|(p, _)| p == point) {
                Some((_, s)) => s.add(values),
                None => stats.push((point.clone(), PointStats::new(values))),
            }
        }
    }
    if !any_record {
        return Err(InvariantError::EmptyTraceSet);
    }
    let vars = vars.unwrap();

    let mut set = InvariantSet::new(provenance);
    for (point, s) in &stats {
        let n = vars.len();
        for i in 0..n {
            if s.min[i] == s.max[i] {
                set.insert(
                    point.clone(),
                    InvariantForm::EqConst { var: vars[i].clone(), c: s.min[i] },
                    s.support,
                );
            }
            set.insert(
                point.clone(),
                InvariantForm::LeConst { var: vars[i].clone(), c: s.max[i] },
                s.support,
            );
            set.insert(
                point.clone(),
                InvariantForm::GeConst { var: vars[i].clone(), c: s.min[i] },
                s.support,
            );
        }
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if let Some(d) = s.diff[k] {
                    set.insert(
                        point.clone(),
                        InvariantForm::equality(&vars[i], &vars[j], d as i64),
                        s.support,
                    );
                }
                if s.le_ij[k] {
                    set.insert(
                        point.clone(),
                        InvariantForm::LeVar { lhs: vars[i].clone(), rhs: vars[j].clone() },
                        s.support,
                    );
                }
                if s.le_ji[k] {
                    set.insert(
                        point.clone(),
                        InvariantForm::LeVar { lhs: vars[j].clone(), rhs: vars[i].clone() },
                        s.support,
                    );
                }
                k += 1;
            }
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::{run, ProgramInput, ProgramPoint};
    use crate::lang::parse;
    use std::collections::BTreeMap;

    fn toy_traces(ns: &[i64]) -> Vec<Trace> {
        let p = parse("proc t(n: int) -> x { x := 0; while L1 (x < n) { x := x + 1; } }").unwrap();
        let ip = crate::exec::instrument(&p);
        ns.iter()
            .map(|&n| {
                let input = ProgramInput {
                    scalars: [("n".to_string(), n)].into(),
                    arrays: BTreeMap::new(),
                    stream: vec![],
                };
                run(&ip, &input, 1_000_000).unwrap().trace
            })
            .collect()
    }

    #[test]
    fn empty_trace_set_is_an_error() {
        assert_eq!(
            infer(&[], Provenance::FromPassing).unwrap_err(),
            InvariantError::EmptyTraceSet
        );
    }

    #[test]
    fn toy_exit_invariants_for_n_2_5_9() {
        let set = infer(&toy_traces(&[2, 5, 9]), Provenance::FromPassing).unwrap();
        let exit = set.at_point(&ProgramPoint::Exit);
        let has = |s: &str| exit.iter().any(|f| f.to_string() == s);
        // x == n and cnt_1 == n hold at exit on every run.
        assert!(has("n == x"));
        assert!(has("cnt_1 == n"));
        assert!(has("cnt_1 == x"));
        // Bounds are the observed extremes.
        assert!(has("n <= 9"));
        assert!(has("n >= 2"));
        assert!(has("x <= 9"));
        assert!(has("x >= 2"));
        // Equalities imply both inequality orientations.
        assert!(has("n <= x"));
        assert!(has("x <= n"));
        // No constant equality: n varied across runs.
        assert!(!exit.iter().any(|f| matches!(f, InvariantForm::EqConst { var, .. } if var == "n")));
        for inv in set.iter() {
            assert_eq!(inv.support, 3);
        }
    }

    #[test]
    fn single_sample_yields_tight_equalities() {
        let set = infer(&toy_traces(&[7]), Provenance::FromPassing).unwrap();
        let exit = set.at_point(&ProgramPoint::Exit);
        let has = |s: &str| exit.iter().any(|f| f.to_string() == s);
        assert!(has("n == 7"));
        assert!(has("n <= 7"));
        assert!(has("n >= 7"));
    }

    #[test]
    fn offset_equalities_are_found() {
        let p = parse("proc t(n: int) -> y { y := n + 3; }").unwrap();
        let traces: Vec<Trace> = [1i64, 4, 9]
            .iter()
            .map(|&n| {
                let input = ProgramInput {
                    scalars: [("n".to_string(), n)].into(),
                    arrays: BTreeMap::new(),
                    stream: vec![],
                };
                run(&p, &input, 1_000).unwrap().trace
            })
            .collect();
        let set = infer(&traces, Provenance::FromPassing).unwrap();
        let exit = set.at_point(&ProgramPoint::Exit);
        assert!(exit.iter().any(|f| f.to_string() == "n == y - 3"));
    }
}

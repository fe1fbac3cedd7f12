//! Entailment over the invariant grammar. Every form is a difference
//! constraint (`x - y <= k`, with a designated zero variable for constant
//! bounds), so conjunction entailment reduces to shortest paths over the
//! constraint graph: the hypothesis entails `x - y <= k` over the integers
//! exactly when the tightest derivable bound on `x - y` is at most `k`, or
//! the hypothesis itself is unsatisfiable.

use super::{InvariantForm, Invariant, InvariantSet};
use std::collections::BTreeMap;

const INF: i128 = i128::MAX / 4;

struct DiffGraph {
    index: BTreeMap<String, usize>,
    /// dist[i][j] = tightest known bound on var_i - var_j; slot 0 is the
    /// zero variable.
    dist: Vec<Vec<i128>>,
}

impl DiffGraph {
    fn new(vars: impl Iterator<Item = String>) -> DiffGraph {
        let mut index = BTreeMap::new();
        for v in vars {
            let next = index.len() + 1;
            index.entry(v).or_insert(next);
        }
        let n = index.len() + 1;
        let mut dist = vec![vec![INF; n]; n];
        for (i, row) in dist.iter_mut().enumerate() {
            row[i] = 0;
        }
        DiffGraph { index, dist }
    }

    fn slot(&self, v: &str) -> usize {
        self.index[v]
    }

    /// Adds the constraint var_i - var_j <= k.
    fn bound(&mut self, i: usize, j: usize, k: i128) {
        if k < self.dist[i][j] {
            self.dist[i][j] = k;
        }
    }

    fn add(&mut self, form: &InvariantForm) {
        match form {
            InvariantForm::EqConst { var, c } => {
                let v = self.slot(var);
                self.bound(v, 0, *c as i128);
                self.bound(0, v, -(*c as i128));
            }
            InvariantForm::LeConst { var, c } => {
                let v = self.slot(var);
                self.bound(v, 0, *c as i128);
            }
            InvariantForm::GeConst { var, c } => {
                let v = self.slot(var);
                self.bound(0, v, -(*c as i128));
            }
            InvariantForm::EqVar { a, b } => {
                let (a, b) = (self.slot(a), self.slot(b));
                self.bound(a, b, 0);
                self.bound(b, a, 0);
            }
            InvariantForm::LeVar { lhs, rhs } => {
                let (l, r) = (self.slot(lhs), self.slot(rhs));
                self.bound(l, r, 0);
            }
            InvariantForm::EqVarOffset { a, b, c } => {
                let (a, b) = (self.slot(a), self.slot(b));
                self.bound(a, b, *c as i128);
                self.bound(b, a, -(*c as i128));
            }
        }
    }

    fn close(&mut self) {
        let n = self.dist.len();
        for k in 0..n {
            for i in 0..n {
                if self.dist[i][k] == INF {
                    continue;
                }
                for j in 0..n {
                    let via = self.dist[i][k] + self.dist[k][j];
                    if via < self.dist[i][j] {
                        self.dist[i][j] = via;
                    }
                }
            }
        }
    }

    fn unsat(&self) -> bool {
        (0..self.dist.len()).any(|i| self.dist[i][i] < 0)
    }

    /// Whether var_i - var_j <= k is derivable.
    fn entails(&self, i: usize, j: usize, k: i128) -> bool {
        self.dist[i][j] <= k
    }
}

/// Decides whether a conjunction of grammar forms entails one form, over the
/// integers. Sound and complete for this grammar.
pub fn forms_imply(hyp: &[InvariantForm], concl: &InvariantForm) -> bool {
    let vars = hyp
        .iter()
        .chain(std::iter::once(concl))
        .flat_map(|f| f.vars())
        .map(str::to_string);
    let mut g = DiffGraph::new(vars);
    for f in hyp {
        g.add(f);
    }
    g.close();
    if g.unsat() {
        return true;
    }
    match concl {
        InvariantForm::EqConst { var, c } => {
            let v = g.slot(var);
            g.entails(v, 0, *c as i128) && g.entails(0, v, -(*c as i128))
        }
        InvariantForm::LeConst { var, c } => g.entails(g.slot(var), 0, *c as i128),
        InvariantForm::GeConst { var, c } => g.entails(0, g.slot(var), -(*c as i128)),
        InvariantForm::EqVar { a, b } => {
            let (a, b) = (g.slot(a), g.slot(b));
            g.entails(a, b, 0) && g.entails(b, a, 0)
        }
        InvariantForm::LeVar { lhs, rhs } => g.entails(g.slot(lhs), g.slot(rhs), 0),
        InvariantForm::EqVarOffset { a, b, c } => {
            let (a, b) = (g.slot(a), g.slot(b));
            g.entails(a, b, *c as i128) && g.entails(b, a, -(*c as i128))
        }
    }
}

/// Whether the hypothesis set's members at the conclusion's program point
/// entail the conclusion.
pub fn implies(hyp: &InvariantSet, concl: &Invariant) -> bool {
    forms_imply(&hyp.at_point(&concl.point), &concl.form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use InvariantForm::*;

    fn le(v: &str, c: i64) -> InvariantForm {
        LeConst { var: v.into(), c }
    }
    fn ge(v: &str, c: i64) -> InvariantForm {
        GeConst { var: v.into(), c }
    }
    fn eqc(v: &str, c: i64) -> InvariantForm {
        EqConst { var: v.into(), c }
    }

    #[test]
    fn squeeze_to_equality() {
        assert!(forms_imply(&[le("x", 5), ge("x", 5)], &eqc("x", 5)));
        assert!(!forms_imply(&[le("x", 5), ge("x", 4)], &eqc("x", 5)));
    }

    #[test]
    fn offset_chain() {
        // x == y + 1 and y <= 4 entail x <= 5.
        let hyp = [InvariantForm::equality("x", "y", 1), le("y", 4)];
        assert!(forms_imply(&hyp, &le("x", 5)));
        assert!(!forms_imply(&hyp, &le("x", 4)));
    }

    #[test]
    fn transitive_variable_order() {
        let hyp = [
            LeVar { lhs: "a".into(), rhs: "b".into() },
            LeVar { lhs: "b".into(), rhs: "c".into() },
        ];
        assert!(forms_imply(&hyp, &LeVar { lhs: "a".into(), rhs: "c".into() }));
        assert!(!forms_imply(&hyp, &LeVar { lhs: "c".into(), rhs: "a".into() }));
    }

    #[test]
    fn unsat_hypothesis_entails_anything() {
        assert!(forms_imply(&[le("x", 1), ge("x", 2)], &eqc("z", 42)));
    }

    #[test]
    fn unconstrained_variable_is_not_bounded() {
        assert!(!forms_imply(&[le("x", 5)], &le("y", 100)));
        assert!(!forms_imply(&[], &ge("y", -100)));
    }

    #[test]
    fn equalities_compose_with_offsets() {
        // x == y, y == z + 2 entail x == z + 2 and z == x - 2.
        let hyp = [InvariantForm::equality("x", "y", 0), InvariantForm::equality("y", "z", 2)];
        assert!(forms_imply(&hyp, &InvariantForm::equality("x", "z", 2)));
        assert!(forms_imply(&hyp, &InvariantForm::equality("z", "x", -2)));
        assert!(!forms_imply(&hyp, &InvariantForm::equality("x", "z", 1)));
    }
}

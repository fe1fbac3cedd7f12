//! Likely-invariant inference over execution traces, counterexample-driven
//! refinement, a native entailment procedure for the invariant grammar, and
//! construction of the correct/violated specification pair.
//!
//! The grammar is fixed to six forms over scalar variables (functional or
//! counter): `v == c`, `v <= c`, `v >= c`, `v == w`, `v <= w`, `v == w + c`.
//! Constants always come from observed trace extremes.

mod implies;
mod infer;
mod refine;

pub use implies::{forms_imply, implies};
pub use infer::infer;
pub use refine::{build_spec, input_only_vars, refine};

use crate::exec::ProgramPoint;
use crate::lang::COUNTER_PREFIX;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InvariantError {
    #[error("cannot infer invariants from an empty trace set")]
    EmptyTraceSet,
    #[error("traces disagree on the variable schema")]
    SchemaMismatch,
}

/// Canonical invariant form. Variable pairs are ordered lexicographically
/// (`v >= w` is rewritten to `w <= v`, equalities keep the smaller name
/// first) and `v == w + 0` collapses to `v == w`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InvariantForm {
    /// v == c
    EqConst { var: String, c: i64 },
    /// v <= c
    LeConst { var: String, c: i64 },
    /// v >= c
    GeConst { var: String, c: i64 },
    /// a == b with a < b lexicographically
    EqVar { a: String, b: String },
    /// lhs <= rhs (either orientation is canonical)
    LeVar { lhs: String, rhs: String },
    /// a == b + c with a < b lexicographically and c != 0
    EqVarOffset { a: String, b: String, c: i64 },
}

impl InvariantForm {
    /// Builds the canonical equality `x == y + c` (meaning x = y + c).
    pub fn equality(x: &str, y: &str, c: i64) -> InvariantForm {
        let (a, b, c) = if x <= y { (x, y, c) } else { (y, x, -c) };
        if c == 0 {
            InvariantForm::EqVar { a: a.to_string(), b: b.to_string() }
        } else {
            InvariantForm::EqVarOffset { a: a.to_string(), b: b.to_string(), c }
        }
    }

    pub fn vars(&self) -> Vec<&str> {
        match self {
            InvariantForm::EqConst { var, .. }
            | InvariantForm::LeConst { var, .. }
            | InvariantForm::GeConst { var, .. } => vec![var],
            InvariantForm::EqVar { a, b } | InvariantForm::EqVarOffset { a, b, .. } => {
                vec![a, b]
            }
            InvariantForm::LeVar { lhs, rhs } => vec![lhs, rhs],
        }
    }

    /// True when any variable is an instrumentation counter; such invariants
    /// describe efficiency rather than functionality.
    pub fn mentions_counter(&self) -> bool {
        self.vars().iter().any(|v| v.starts_with(COUNTER_PREFIX))
    }

    /// Evaluates the form over a valuation; `None` if a variable is absent.
    pub fn eval(&self, value_of: &impl Fn(&str) -> Option<i64>) -> Option<bool> {
        Some(match self {
            InvariantForm::EqConst { var, c } => value_of(var)? == *c,
            InvariantForm::LeConst { var, c } => value_of(var)? <= *c,
            InvariantForm::GeConst { var, c } => value_of(var)? >= *c,
            InvariantForm::EqVar { a, b } => value_of(a)? == value_of(b)?,
            InvariantForm::LeVar { lhs, rhs } => value_of(lhs)? <= value_of(rhs)?,
            InvariantForm::EqVarOffset { a, b, c } => {
                // Evaluate as a - b == c to stay overflow-safe.
                (value_of(a)? as i128) - (value_of(b)? as i128) == *c as i128
            }
        })
    }
}

impl fmt::Display for InvariantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantForm::EqConst { var, c } => write!(f, "{var} == {c}"),
            InvariantForm::LeConst { var, c } => write!(f, "{var} <= {c}"),
            InvariantForm::GeConst { var, c } => write!(f, "{var} >= {c}"),
            InvariantForm::EqVar { a, b } => write!(f, "{a} == {b}"),
            InvariantForm::LeVar { lhs, rhs } => write!(f, "{lhs} <= {rhs}"),
            InvariantForm::EqVarOffset { a, b, c } if *c < 0 => {
                write!(f, "{a} == {b} - {}", -c)
            }
            InvariantForm::EqVarOffset { a, b, c } => write!(f, "{a} == {b} + {c}"),
        }
    }
}

/// An invariant attached to a program point, with the number of samples it
/// was checked against.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Invariant {
    pub point: ProgramPoint,
    pub form: InvariantForm,
    pub support: u32,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} (support {})", self.point, self.form, self.support)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    FromPassing,
    FromFailing,
    Refined,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::FromPassing => "from_passing",
            Provenance::FromFailing => "from_failing",
            Provenance::Refined => "refined",
        };
        f.write_str(s)
    }
}

/// Point-indexed, canonically ordered invariant collection. No two members
/// share the same (point, form).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantSet {
    pub provenance: Provenance,
    items: BTreeMap<(ProgramPoint, InvariantForm), u32>,
}

impl InvariantSet {
    pub fn new(provenance: Provenance) -> InvariantSet {
        InvariantSet { provenance, items: BTreeMap::new() }
    }

    pub fn insert(&mut self, point: ProgramPoint, form: InvariantForm, support: u32) {
        let entry = self.items.entry((point, form)).or_insert(0);
        *entry = (*entry).max(support);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, point: &ProgramPoint, form: &InvariantForm) -> bool {
        self.items.contains_key(&(point.clone(), form.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = Invariant> + '_ {
        self.items.iter().map(|((point, form), support)| Invariant {
            point: point.clone(),
            form: form.clone(),
            support: *support,
        })
    }

    /// Forms attached to one point, in canonical order.
    pub fn at_point(&self, point: &ProgramPoint) -> Vec<InvariantForm> {
        self.items
            .iter()
            .filter(|((p, _), _)| p == point)
            .map(|((_, form), _)| form.clone())
            .collect()
    }

    pub fn points(&self) -> Vec<ProgramPoint> {
        let mut pts: Vec<ProgramPoint> = self.items.keys().map(|(p, _)| p.clone()).collect();
        pts.dedup();
        pts
    }

    /// Members whose variables are all functional (no counters).
    pub fn functional_only(&self) -> InvariantSet {
        self.filtered(|form| !form.mentions_counter())
    }

    /// Members mentioning at least one counter variable.
    pub fn counters_only(&self) -> InvariantSet {
        self.filtered(|form| form.mentions_counter())
    }

    pub fn filtered(&self, keep: impl Fn(&InvariantForm) -> bool) -> InvariantSet {
        InvariantSet {
            provenance: self.provenance,
            items: self
                .items
                .iter()
                .filter(|((_, form), _)| keep(form))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Stable key-value report, one line per invariant.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for inv in self.iter() {
            out.push_str(&format!(
                "point={}\tinv={}\tsupport={}\tprovenance={}\n",
                inv.point, inv.form, inv.support, self.provenance
            ));
        }
        out
    }
}

/// The specification pair: invariants a patch must keep (`correct`) and
/// invariants a patch must break (`violated`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spec {
    pub correct: InvariantSet,
    pub violated: InvariantSet,
}

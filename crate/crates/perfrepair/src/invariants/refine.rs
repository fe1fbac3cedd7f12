//! Counterexample-driven weakening of an inferred set against generated
//! inputs, plus construction of the correct/violated specification pair.

use super::{forms_imply, InvariantForm, InvariantSet, Provenance, Spec};
use crate::exec::{run, GeneratorSpec, ProgramPoint, Trace};
use crate::lang::{LValue, ParamType, Program, StmtKind};
use std::collections::{BTreeMap, BTreeSet};

/// Scalar parameters the program never writes. Invariants over these alone
/// describe the input domain, not program behavior, and are filtered out of
/// refined sets and specifications.
pub fn input_only_vars(p: &Program) -> BTreeSet<String> {
    let mut written = BTreeSet::new();
    p.for_each_stmt(&mut |s| match &s.kind {
        StmtKind::Assign { target: LValue::Var(v), .. } | StmtKind::Read { target: LValue::Var(v) } => {
            written.insert(v.clone());
        }
        _ => {}
    });
    p.params
        .iter()
        .filter(|prm| prm.ty == ParamType::Int && !written.contains(&prm.name))
        .map(|prm| prm.name.clone())
        .collect()
}

fn is_input_bound(form: &InvariantForm, input_vars: &BTreeSet<String>) -> bool {
    form.vars().iter().all(|v| input_vars.contains(*v))
}

/// Samples collected per point from a group of traces.
fn samples_by_point(traces: &[Trace]) -> BTreeMap<ProgramPoint, Vec<BTreeMap<String, i64>>> {
    let mut out: BTreeMap<ProgramPoint, Vec<BTreeMap<String, i64>>> = BTreeMap::new();
    for t in traces {
        for (point, values) in &t.records {
            let valuation: BTreeMap<String, i64> =
                t.vars.iter().cloned().zip(values.iter().copied()).collect();
            out.entry(point.clone()).or_default().push(valuation);
        }
    }
    out
}

/// Weakens one invariant so it also holds on the given samples, or drops it.
/// Constants move to the new extremes; falsified equalities decay to the
/// inequality direction that still holds, if any.
fn weaken(
    form: &InvariantForm,
    samples: &[BTreeMap<String, i64>],
) -> Option<InvariantForm> {
    let holds = |f: &InvariantForm| {
        samples.iter().all(|s| f.eval(&|v| s.get(v).copied()) == Some(true))
    };
    if holds(form) {
        return Some(form.clone());
    }
    let extreme = |v: &str, max: bool| -> Option<i64> {
        let vals = samples.iter().map(|s| s.get(v).copied());
        let vals: Option<Vec<i64>> = vals.collect();
        let vals = vals?;
        if max { vals.into_iter().max() } else { vals.into_iter().min() }
    };
    match form {
        InvariantForm::LeConst { var, c } => {
            Some(InvariantForm::LeConst { var: var.clone(), c: (*c).max(extreme(var, true)?) })
        }
        InvariantForm::GeConst { var, c } => {
            Some(InvariantForm::GeConst { var: var.clone(), c: (*c).min(extreme(var, false)?) })
        }
        InvariantForm::EqConst { .. } => None,
        InvariantForm::EqVar { a, b } | InvariantForm::EqVarOffset { a, b, .. } => {
            // An equality that failed may survive as one <= direction,
            // provided the original offset does not contradict it.
            let c = match form {
                InvariantForm::EqVarOffset { c, .. } => *c,
                _ => 0,
            };
            for (lhs, rhs, ok_offset) in [(a, b, c <= 0), (b, a, c >= 0)] {
                let cand = InvariantForm::LeVar { lhs: lhs.clone(), rhs: rhs.clone() };
                if ok_offset && holds(&cand) {
                    return Some(cand);
                }
            }
            None
        }
        InvariantForm::LeVar { .. } => None,
    }
}

/// Refines a set against up to `budget` generated inputs: every surviving
/// member holds on the original samples and on all generated runs, and
/// input-domain invariants are dropped. A zero budget only applies the
/// input-domain filter.
pub fn refine(
    p: &Program,
    set: &InvariantSet,
    gen: &GeneratorSpec,
    seed: u64,
    budget: usize,
    step_budget: u64,
) -> InvariantSet {
    let input_vars = input_only_vars(p);
    let traces: Vec<Trace> = gen
        .generate(seed, budget)
        .iter()
        .filter_map(|input| run(p, input, step_budget).ok())
        .filter(|r| r.status.is_terminated())
        .map(|r| r.trace)
        .collect();
    let samples = samples_by_point(&traces);
    let empty = Vec::new();

    let mut out = InvariantSet::new(Provenance::Refined);
    for inv in set.iter() {
        if is_input_bound(&inv.form, &input_vars) {
            continue;
        }
        let point_samples = samples.get(&inv.point).unwrap_or(&empty);
        if let Some(form) = weaken(&inv.form, point_samples) {
            out.insert(inv.point, form, inv.support + point_samples.len() as u32);
        }
    }
    out
}

/// A form a repair can meaningfully falsify: either purely functional, or a
/// constant bound on a single counter. Relations tying a counter to a
/// functional variable (or to another counter) hold for accidental reasons
/// on almost any run and would make every candidate fail the check.
fn falsifiable(form: &InvariantForm) -> bool {
    !form.mentions_counter() || form.vars().len() == 1
}

/// Builds the specification pair. `violated` holds the failing-run members
/// (support at least `min_support`, not input-domain, falsifiable) that
/// neither the refined passing-run set nor the raw one entails: a form the
/// passing runs also exhibited does not characterize the bug, even when
/// refinement later dropped it. `correct` is the refined passing-run set.
pub fn build_spec(
    good: &InvariantSet,
    raw_good: &InvariantSet,
    mix: &InvariantSet,
    input_vars: &BTreeSet<String>,
    min_support: u32,
) -> Spec {
    let mut violated = InvariantSet::new(Provenance::FromFailing);
    for inv in mix.iter() {
        if inv.support < min_support
            || is_input_bound(&inv.form, input_vars)
            || !falsifiable(&inv.form)
        {
            continue;
        }
        if !forms_imply(&good.at_point(&inv.point), &inv.form)
            && !forms_imply(&raw_good.at_point(&inv.point), &inv.form)
        {
            violated.insert(inv.point, inv.form, inv.support);
        }
    }
    let correct =
        good.filtered(|form| !is_input_bound(form, input_vars));
    Spec { correct, violated }
}

//! Command implementations. Each returns a deterministic plain-text report
//! plus an exit code: 0 for a valid patch (or successful artifact dump), 1
//! for a failed or invalid repair, 2 for usage and configuration errors.

use super::report::diff_lines;
use super::suite::TestSuite;
use crate::exec::{classify, instrument, run, ProgramPoint, RunClass, Trace};
use crate::invariants::{
    build_spec, infer, input_only_vars, InvariantForm, InvariantSet, Provenance, Spec,
};
use crate::lang::{pretty_print, Program};
use crate::repair::{apply_patch, localize, search, Mutation, SearchOutcome};
use crate::validate::{validate_patch, Verdict};
use std::fmt::Write as _;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Everything derived from running the suite against the target program.
pub struct Derived {
    pub instrumented: Program,
    pub case_rows: Vec<String>,
    pub fast_traces: Vec<Trace>,
    pub slow_traces: Vec<Trace>,
    /// Invariants over all terminated runs, fast and slow together.
    pub all_runs: Option<InvariantSet>,
    pub good: Option<InvariantSet>,
    pub faulty: Option<InvariantSet>,
    pub refined_good: Option<InvariantSet>,
    pub spec: Option<Spec>,
}

pub fn derive(suite: &TestSuite) -> Derived {
    let instrumented = instrument(&suite.program);
    let mut fast_traces = Vec::new();
    let mut slow_traces = Vec::new();
    let mut all_traces = Vec::new();
    let mut case_rows = Vec::new();
    for t in &suite.cases {
        match run(&instrumented, &t.input, suite.budget) {
            Ok(r) => {
                let class = classify(&r, &t.expected, t.threshold);
                let label = match class {
                    RunClass::Fast => "fast",
                    RunClass::Slow { functional_failure: true } => "slow_functional",
                    RunClass::Slow { functional_failure: false } => "slow",
                };
                case_rows.push(format!(
                    "id={}\tclass={}\tstatus={}\tsteps={}",
                    t.id, label, r.status, r.steps
                ));
                if r.status.is_terminated() {
                    all_traces.push(r.trace.clone());
                }
                if class == RunClass::Fast {
                    fast_traces.push(r.trace);
                } else {
                    slow_traces.push(r.trace);
                }
            }
            Err(e) => case_rows.push(format!("id={}\tclass=error\tstatus={e}\tsteps=0", t.id)),
        }
    }

    let good = infer(&fast_traces, Provenance::FromPassing).ok();
    let faulty = infer(&slow_traces, Provenance::FromFailing).ok();
    let all_runs = infer(&all_traces, Provenance::FromPassing).ok();
    // Only the passing-run side is refined; weakening the faulty side would
    // erase the bounds that characterize the bug.
    let refined_good = good.as_ref().map(|g| {
        crate::invariants::refine(
            &instrumented,
            g,
            &suite.generator,
            suite.seed,
            suite.falsification_budget,
            suite.budget,
        )
    });
    let spec = match (&refined_good, &good, &faulty) {
        (Some(g), Some(raw), Some(f)) => {
            Some(build_spec(g, raw, f, &input_only_vars(&suite.program), 2))
        }
        _ => None,
    };
    Derived {
        instrumented,
        case_rows,
        fast_traces,
        slow_traces,
        all_runs,
        good,
        faulty,
        refined_good,
        spec,
    }
}

/// Tightest `v <= c` (or `v == c`) bound at exit for each counter variable.
pub fn counter_exit_bounds(set: &InvariantSet) -> Vec<(String, i64)> {
    let mut out: std::collections::BTreeMap<String, i64> = std::collections::BTreeMap::new();
    for f in set.at_point(&ProgramPoint::Exit) {
        let (var, c) = match &f {
            InvariantForm::LeConst { var, c } | InvariantForm::EqConst { var, c } => (var, *c),
            _ => continue,
        };
        if !f.mentions_counter() {
            continue;
        }
        let e = out.entry(var.clone()).or_insert(c);
        *e = (*e).min(c);
    }
    out.into_iter().collect()
}

fn push_section(out: &mut String, title: &str, body: &str) {
    let _ = writeln!(out, "[{title}]");
    out.push_str(body);
    if !body.ends_with('\n') && !body.is_empty() {
        out.push('\n');
    }
}

fn header(suite: &TestSuite, d: &Derived) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "program={}", suite.program.name);
    let _ = writeln!(
        out,
        "cases={} fast={} slow={}",
        suite.cases.len(),
        d.fast_traces.len(),
        d.slow_traces.len()
    );
    let _ = writeln!(out, "budget={} seed={}", suite.budget, suite.seed);
    push_section(&mut out, "cases", &d.case_rows.join("\n"));
    out
}

pub fn run_infer(suite: &TestSuite) -> (String, i32) {
    let d = derive(suite);
    let mut out = String::from("# invariant report\n");
    out.push_str(&header(suite, &d));
    if let Some(all) = &d.all_runs {
        let bounds: Vec<String> =
            counter_exit_bounds(all).iter().map(|(v, c)| format!("{v}={c}")).collect();
        push_section(&mut out, "bounds", &bounds.join("\n"));
    }
    if let Some(g) = &d.good {
        push_section(&mut out, "good", &g.report());
    }
    if let Some(f) = &d.faulty {
        push_section(&mut out, "faulty", &f.report());
    }
    if let Some(r) = &d.refined_good {
        push_section(&mut out, "refined", &r.report());
    }
    if let Some(s) = &d.spec {
        push_section(&mut out, "spec.correct", &s.correct.report());
        push_section(&mut out, "spec.violated", &s.violated.report());
    }
    (out, EXIT_OK)
}

pub fn run_trace(suite: &TestSuite, case_id: Option<&str>) -> (String, i32) {
    let instrumented = instrument(&suite.program);
    let mut out = String::from("# trace dump\n");
    let mut matched = false;
    for t in &suite.cases {
        if case_id.is_some_and(|id| id != t.id) {
            continue;
        }
        matched = true;
        match run(&instrumented, &t.input, suite.budget) {
            Ok(r) => {
                let _ = writeln!(out, "case={} status={} steps={}", t.id, r.status, r.steps);
                out.push_str(&r.trace.dump());
            }
            Err(e) => {
                let _ = writeln!(out, "case={} error={e}", t.id);
            }
        }
    }
    if !matched {
        return (format!("no case with id `{}`\n", case_id.unwrap_or("")), EXIT_USAGE);
    }
    (out, EXIT_OK)
}

pub fn run_bench(suite: &TestSuite) -> (String, i32) {
    let d = derive(suite);
    let mut out = String::from("# bench\n");
    out.push_str(&header(suite, &d));
    (out, EXIT_OK)
}

fn verdict_section(out: &mut String, v: &Verdict) {
    let mut body = String::new();
    let _ = writeln!(
        body,
        "result={}",
        v.stage.map(|s| s.to_string()).unwrap_or_else(|| "valid".to_string())
    );
    let _ = writeln!(body, "passes_suite={}", v.validity.passes_suite);
    for id in &v.validity.failing_tests {
        let _ = writeln!(body, "failing_test={id}");
    }
    let _ = writeln!(body, "violated_falsified={}", v.validity.violated_falsified);
    for inv in &v.validity.unfalsified {
        let _ = writeln!(body, "unfalsified={inv}");
    }
    for inv in &v.validity.vacuously_falsified {
        let _ = writeln!(body, "vacuously_falsified={inv}");
    }
    let _ = writeln!(body, "correct_preserved={}", v.validity.correct_preserved);
    for inv in &v.validity.broken_correct {
        let _ = writeln!(body, "broken_correct={inv}");
    }
    if let Some(s) = &v.sema {
        let _ = writeln!(body, "sema_eq={}", s.equivalent);
        for (side, p) in &s.missing_points {
            let _ = writeln!(body, "missing_point={p} side={side:?}");
        }
        for (side, inv) in &s.unentailed {
            let _ = writeln!(body, "unentailed={inv} side={side:?}");
        }
    }
    if let Some(p) = &v.pred {
        let _ = writeln!(body, "pred_sm={}", p.smaller);
        for (label, orig, new) in &p.bounds {
            let _ = writeln!(body, "bound {label}: {orig} -> {new}");
        }
    }
    push_section(out, "verdict", &body);
}

fn validate_candidate(
    suite: &TestSuite,
    patched: &Program,
) -> Result<Verdict, crate::validate::ValidateError> {
    let d = derive(suite);
    let spec = match d.spec {
        Some(s) => s,
        None => {
            return Err(crate::validate::ValidateError::NoCommonRuns);
        }
    };
    validate_patch(
        &suite.program,
        patched,
        &spec,
        &suite.cases,
        &suite.generator,
        suite.seed,
        suite.falsification_budget,
        suite.budget,
    )
}

pub fn run_validate(suite: &TestSuite, patch: &[Mutation]) -> (String, i32) {
    let mut out = String::from("# validate report\n");
    let _ = writeln!(out, "program={}", suite.program.name);
    push_section(
        &mut out,
        "patch",
        &patch.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("\n"),
    );
    let patched = match apply_patch(&suite.program, patch) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(out, "patch_error={e}");
            return (out, EXIT_FAIL);
        }
    };
    push_section(
        &mut out,
        "diff",
        &diff_lines(&pretty_print(&suite.program), &pretty_print(&patched)),
    );
    match validate_candidate(suite, &patched) {
        Ok(v) => {
            let exit = if v.is_valid() { EXIT_OK } else { EXIT_FAIL };
            verdict_section(&mut out, &v);
            (out, exit)
        }
        Err(e) => {
            let _ = writeln!(out, "validate_error={e}");
            (out, EXIT_FAIL)
        }
    }
}

pub struct RepairOutcome {
    pub report: String,
    pub patch: Option<Vec<Mutation>>,
    pub patched: Option<Program>,
    pub exit: i32,
}

pub fn run_repair(suite: &TestSuite) -> RepairOutcome {
    let d = derive(suite);
    let mut out = String::from("# repair report\n");
    out.push_str(&header(suite, &d));

    let spec = match (&d.spec, d.fast_traces.is_empty(), d.slow_traces.is_empty()) {
        (Some(s), false, false) => s.clone(),
        _ => {
            out.push_str("fail=suite must classify at least one fast and one slow run\n");
            return RepairOutcome { report: out, patch: None, patched: None, exit: EXIT_FAIL };
        }
    };
    let _ = writeln!(out, "[spec]");
    let _ = writeln!(out, "correct={} violated={}", spec.correct.len(), spec.violated.len());
    push_section(&mut out, "spec.violated", &spec.violated.report());

    let weights = localize(&suite.program, &spec.violated);
    let ranking: Vec<String> =
        weights.iter().map(|(id, w)| format!("stmt={id}\tweight={w:.6}")).collect();
    push_section(&mut out, "ranking", &ranking.join("\n"));

    let outcome = search(&suite.program, &suite.cases, &weights, &suite.search);
    let candidates = match outcome {
        SearchOutcome::Found(c) => c,
        SearchOutcome::Exhausted { best_fitness, generations } => {
            let _ = writeln!(
                out,
                "fail=search exhausted after {generations} generations \
                 (best: {} failing tests, {} steps)",
                best_fitness.tests_failed, best_fitness.total_steps
            );
            return RepairOutcome { report: out, patch: None, patched: None, exit: EXIT_FAIL };
        }
    };
    let _ = writeln!(out, "candidates={}", candidates.len());

    for (k, cand) in candidates.iter().enumerate() {
        let _ = writeln!(out, "[candidate {k}]");
        push_section(
            &mut out,
            "patch",
            &cand.patch.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("\n"),
        );
        match validate_patch(
            &suite.program,
            &cand.program,
            &spec,
            &suite.cases,
            &suite.generator,
            suite.seed,
            suite.falsification_budget,
            suite.budget,
        ) {
            Ok(v) => {
                verdict_section(&mut out, &v);
                if v.is_valid() {
                    push_section(
                        &mut out,
                        "diff",
                        &diff_lines(
                            &pretty_print(&suite.program),
                            &pretty_print(&cand.program),
                        ),
                    );
                    let _ = writeln!(
                        out,
                        "[stats]\npassing_steps_patched={}",
                        cand.fitness.total_steps
                    );
                    return RepairOutcome {
                        report: out,
                        patch: Some(cand.patch.clone()),
                        patched: Some(cand.program.clone()),
                        exit: EXIT_OK,
                    };
                }
            }
            Err(e) => {
                let _ = writeln!(out, "validate_error={e}");
            }
        }
    }
    out.push_str("fail=no candidate survived validation\n");
    RepairOutcome { report: out, patch: None, patched: None, exit: EXIT_FAIL }
}

//! Three-step patch validity: the candidate must pass the whole suite, must
//! falsify every violated invariant on at least one run, and must preserve
//! every functional correct invariant on all runs.

use crate::exec::{instrument, run, GeneratorSpec, ProgramPoint, ProgramInput, RunClass};
use crate::invariants::{Invariant, Spec};
use crate::lang::Program;
use crate::repair::TestCase;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct ValidityReport {
    pub passes_suite: bool,
    pub failing_tests: Vec<String>,
    pub violated_falsified: bool,
    /// Violated invariants that still held on every observed run.
    pub unfalsified: Vec<Invariant>,
    /// Violated invariants whose program point was never reached; they count
    /// as falsified but are reported separately.
    pub vacuously_falsified: Vec<Invariant>,
    pub correct_preserved: bool,
    pub broken_correct: Vec<Invariant>,
    pub valid: bool,
}

type Samples = BTreeMap<ProgramPoint, Vec<BTreeMap<String, i64>>>;

/// Runs the instrumented program on every given input and groups terminated
/// runs' valuations by program point.
pub(crate) fn collect_samples(
    instrumented: &Program,
    inputs: &[ProgramInput],
    step_budget: u64,
) -> Samples {
    let mut samples: Samples = BTreeMap::new();
    for input in inputs {
        let r = match run(instrumented, input, step_budget) {
            Ok(r) if r.status.is_terminated() => r,
            _ => continue,
        };
        for (point, values) in &r.trace.records {
            let valuation: BTreeMap<String, i64> =
                r.trace.vars.iter().cloned().zip(values.iter().copied()).collect();
            samples.entry(point.clone()).or_default().push(valuation);
        }
    }
    samples
}

/// Checks a candidate (plain, uninstrumented) against the specification.
/// Generated inputs come from the same generator and seed used for
/// refinement, so what refinement could not weaken, validation can falsify.
pub fn check_validity(
    patched: &Program,
    spec: &Spec,
    suite: &[TestCase],
    gen: &GeneratorSpec,
    seed: u64,
    falsification_budget: usize,
    step_budget: u64,
) -> ValidityReport {
    let mut failing_tests = Vec::new();
    for t in suite {
        let fast = run(patched, &t.input, t.threshold + 1)
            .map(|r| crate::exec::classify(&r, &t.expected, t.threshold) == RunClass::Fast)
            .unwrap_or(false);
        if !fast {
            failing_tests.push(t.id.clone());
        }
    }
    let passes_suite = failing_tests.is_empty();

    let instrumented = instrument(patched);
    let mut inputs: Vec<ProgramInput> = suite.iter().map(|t| t.input.clone()).collect();
    inputs.extend(gen.generate(seed, falsification_budget));
    let samples = collect_samples(&instrumented, &inputs, step_budget);
    let empty = Vec::new();

    let mut unfalsified = Vec::new();
    let mut vacuously_falsified = Vec::new();
    for inv in spec.violated.iter() {
        let at_point = samples.get(&inv.point).unwrap_or(&empty);
        if at_point.is_empty() {
            vacuously_falsified.push(inv);
        } else if at_point.iter().all(|s| inv.form.eval(&|v| s.get(v).copied()) == Some(true)) {
            unfalsified.push(inv);
        }
    }
    let violated_falsified = unfalsified.is_empty();

    let mut broken_correct = Vec::new();
    for inv in spec.correct.functional_only().iter() {
        let at_point = samples.get(&inv.point).unwrap_or(&empty);
        if at_point.iter().any(|s| inv.form.eval(&|v| s.get(v).copied()) == Some(false)) {
            broken_correct.push(inv);
        }
    }
    let correct_preserved = broken_correct.is_empty();

    ValidityReport {
        valid: passes_suite && violated_falsified && correct_preserved,
        passes_suite,
        failing_tests,
        violated_falsified,
        unfalsified,
        vacuously_falsified,
        correct_preserved,
        broken_correct,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{InvariantForm, InvariantSet, Provenance};
    use crate::lang::parse;

    const LINEAR: &str = "proc t(n: int) -> x { x := 0; while L1 (x < n) { x := x + 1; } }";

    fn toy_suite() -> Vec<TestCase> {
        [2i64, 5]
            .iter()
            .map(|&n| TestCase {
                id: format!("n{n}"),
                input: ProgramInput {
                    scalars: [("n".to_string(), n)].into(),
                    arrays: BTreeMap::new(),
                    stream: vec![],
                },
                expected: [("x".to_string(), n)].into(),
                threshold: 100,
            })
            .collect()
    }

    fn toy_gen() -> GeneratorSpec {
        GeneratorSpec {
            scalars: vec![("n".to_string(), crate::exec::ScalarDomain::Range(0, 10))],
            arrays: vec![],
            stream_len: (0, 0),
            stream_values: (0, 0),
        }
    }

    #[test]
    fn original_as_its_own_patch_is_invalid() {
        // The violated invariant still holds on every run of the unpatched
        // program, so step two fails.
        let p = parse(LINEAR).unwrap();
        let mut violated = InvariantSet::new(Provenance::FromFailing);
        violated.insert(
            ProgramPoint::Exit,
            InvariantForm::EqVar { a: "cnt_1".into(), b: "n".into() },
            2,
        );
        let spec = Spec { correct: InvariantSet::new(Provenance::Refined), violated };
        let r = check_validity(&p, &spec, &toy_suite(), &toy_gen(), 9, 32, 100_000);
        assert!(r.passes_suite);
        assert!(!r.violated_falsified);
        assert!(!r.valid);
        assert_eq!(r.unfalsified.len(), 1);
    }

    #[test]
    fn broken_functional_invariant_is_detected() {
        let p = parse(LINEAR).unwrap();
        let mut correct = InvariantSet::new(Provenance::Refined);
        correct.insert(
            ProgramPoint::Exit,
            InvariantForm::LeConst { var: "x".into(), c: 5 },
            2,
        );
        let spec = Spec { correct, violated: InvariantSet::new(Provenance::FromFailing) };
        // Generated inputs reach n = 10, breaking x <= 5 at exit.
        let r = check_validity(&p, &spec, &toy_suite(), &toy_gen(), 9, 32, 100_000);
        assert!(!r.correct_preserved);
        assert!(!r.valid);
    }

    #[test]
    fn failing_suite_test_is_reported_by_id() {
        let p = parse("proc t(n: int) -> x { x := n + 1; }").unwrap();
        let spec = Spec {
            correct: InvariantSet::new(Provenance::Refined),
            violated: InvariantSet::new(Provenance::FromFailing),
        };
        let r = check_validity(&p, &spec, &toy_suite(), &toy_gen(), 9, 0, 100_000);
        assert!(!r.passes_suite);
        assert!(!r.valid);
        assert_eq!(r.failing_tests, vec!["n2".to_string(), "n5".to_string()]);
    }
}

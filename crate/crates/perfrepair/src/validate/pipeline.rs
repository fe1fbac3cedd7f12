//! Staged patch verdict. A candidate advances through the suite check, the
//! violated-invariant falsification check, the correct-invariant preservation
//! check, and finally semantic equivalence plus the strict loop-bound
//! improvement; the first failing stage short-circuits with its evidence.

use super::predsm::{pred_sm, PredSmReport};
use super::semaeq::{sema_eq, SemaEqReport};
use super::validity::{check_validity, ValidityReport};
use crate::exec::{instrument, run, GeneratorSpec, ProgramInput, Trace};
use crate::invariants::{infer, Provenance, Spec};
use crate::lang::Program;
use crate::repair::TestCase;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ValidateError {
    #[error("no input terminated on both programs; cannot compare invariants")]
    NoCommonRuns,
    #[error(transparent)]
    PredSm(#[from] super::predsm::PredSmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailStage {
    FailedTests,
    FailedViolatedCheck,
    FailedCorrectCheck,
    FailedSemaEq,
    FailedPredSm,
}

impl fmt::Display for FailStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailStage::FailedTests => "failed_tests",
            FailStage::FailedViolatedCheck => "failed_violated_check",
            FailStage::FailedCorrectCheck => "failed_correct_check",
            FailStage::FailedSemaEq => "failed_sema_eq",
            FailStage::FailedPredSm => "failed_pred_sm",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    /// `None` means the patch is valid.
    pub stage: Option<FailStage>,
    pub validity: ValidityReport,
    /// Present when the candidate reached the final stage.
    pub sema: Option<SemaEqReport>,
    pub pred: Option<PredSmReport>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.stage.is_none()
    }
}

/// Runs both instrumented programs on the same inputs and infers each side's
/// invariants from the runs where both terminated.
fn paired_sets(
    original: &Program,
    patched: &Program,
    inputs: &[ProgramInput],
    step_budget: u64,
) -> Result<(crate::invariants::InvariantSet, crate::invariants::InvariantSet), ValidateError> {
    let io = instrument(original);
    let ip = instrument(patched);
    let mut orig_traces: Vec<Trace> = Vec::new();
    let mut patch_traces: Vec<Trace> = Vec::new();
    for input in inputs {
        let a = run(&io, input, step_budget);
        let b = run(&ip, input, step_budget);
        if let (Ok(a), Ok(b)) = (a, b) {
            if a.status.is_terminated() && b.status.is_terminated() {
                orig_traces.push(a.trace);
                patch_traces.push(b.trace);
            }
        }
    }
    let so = infer(&orig_traces, Provenance::Refined).map_err(|_| ValidateError::NoCommonRuns)?;
    let sp = infer(&patch_traces, Provenance::Refined).map_err(|_| ValidateError::NoCommonRuns)?;
    Ok((so, sp))
}

/// Projection of a set onto the program-exit point.
fn exit_only(set: &crate::invariants::InvariantSet) -> crate::invariants::InvariantSet {
    let mut out = crate::invariants::InvariantSet::new(set.provenance);
    for inv in set.iter() {
        if inv.point == crate::exec::ProgramPoint::Exit {
            out.insert(inv.point, inv.form, inv.support);
        }
    }
    out
}

/// Full staged validation of one candidate patch.
#[allow(clippy::too_many_arguments)]
pub fn validate_patch(
    original: &Program,
    patched: &Program,
    spec: &Spec,
    suite: &[TestCase],
    gen: &GeneratorSpec,
    seed: u64,
    falsification_budget: usize,
    step_budget: u64,
) -> Result<Verdict, ValidateError> {
    let validity =
        check_validity(patched, spec, suite, gen, seed, falsification_budget, step_budget);
    let early = if !validity.passes_suite {
        Some(FailStage::FailedTests)
    } else if !validity.violated_falsified {
        Some(FailStage::FailedViolatedCheck)
    } else if !validity.correct_preserved {
        Some(FailStage::FailedCorrectCheck)
    } else {
        None
    };
    if let Some(stage) = early {
        return Ok(Verdict { stage: Some(stage), validity, sema: None, pred: None });
    }

    // Both sides are re-inferred from the same inputs: the suite plus the
    // falsification batch, so divergence outside the suite still shows up.
    let mut inputs: Vec<ProgramInput> = suite.iter().map(|t| t.input.clone()).collect();
    inputs.extend(gen.generate(seed, falsification_budget));
    let (set_orig, set_patch) = paired_sets(original, patched, &inputs, step_budget)?;

    // Functional equivalence is judged at program exit: a faster program
    // necessarily visits intermediate points differently, but its
    // input-output behavior must be indistinguishable.
    let sema = sema_eq(&exit_only(&set_orig), &exit_only(&set_patch));
    if !sema.equivalent {
        return Ok(Verdict {
            stage: Some(FailStage::FailedSemaEq),
            validity,
            sema: Some(sema),
            pred: None,
        });
    }
    let pred = pred_sm(&set_orig, &set_patch, &original.loop_labels())?;
    let stage = if pred.smaller { None } else { Some(FailStage::FailedPredSm) };
    Ok(Verdict { stage, validity, sema: Some(sema), pred: Some(pred) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::ScalarDomain;
    use crate::invariants::{build_spec, input_only_vars, refine};
    use crate::lang::parse;
    use std::collections::BTreeMap;

    /// Quadratic original: x is rebuilt from zero on every outer iteration.
    const BUGGY: &str = "proc t(n: int) -> total {\n\
        total := 0;\n\
        k := 0;\n\
        while L1 (k < n) {\n\
          x := 0;\n\
          j := 0;\n\
          while L2 (j < k) {\n\
            x := x + 1;\n\
            j := j + 1;\n\
          }\n\
          total := total + 1;\n\
          k := k + 1;\n\
        }\n\
      }";
    /// Developer fix: x and j initialized once, inner loop resumes from j.
    const FIXED: &str = "proc t(n: int) -> total {\n\
        total := 0;\n\
        k := 0;\n\
        x := 0;\n\
        j := 0;\n\
        while L1 (k < n) {\n\
          while L2 (j < k) {\n\
            x := x + 1;\n\
            j := j + 1;\n\
          }\n\
          total := total + 1;\n\
          k := k + 1;\n\
        }\n\
      }";

    fn suite() -> Vec<TestCase> {
        [1i64, 3, 5, 40, 60]
            .iter()
            .map(|&n| TestCase {
                id: format!("n{n}"),
                input: ProgramInput {
                    scalars: [("n".to_string(), n)].into(),
                    arrays: BTreeMap::new(),
                    stream: vec![],
                },
                expected: [("total".to_string(), n)].into(),
                threshold: 40 + 9 * n as u64,
            })
            .collect()
    }

    fn generator() -> GeneratorSpec {
        // The domain covers the suite's sizes, so refined correct invariants
        // carry no small-input artifacts.
        GeneratorSpec {
            scalars: vec![("n".to_string(), ScalarDomain::Range(0, 60))],
            arrays: vec![],
            stream_len: (0, 0),
            stream_values: (0, 0),
        }
    }

    fn derive_spec(p: &Program) -> Spec {
        let ip = instrument(p);
        let tests = suite();
        let mut fast = Vec::new();
        let mut slow = Vec::new();
        for t in &tests {
            let r = run(&ip, &t.input, 1_000_000).unwrap();
            let class = crate::exec::classify(&r, &t.expected, t.threshold);
            if class == crate::exec::RunClass::Fast {
                fast.push(r.trace);
            } else {
                slow.push(r.trace);
            }
        }
        let raw_good = infer(&fast, Provenance::FromPassing).unwrap();
        let faulty = infer(&slow, Provenance::FromFailing).unwrap();
        // Only the passing-run set is refined; weakening the faulty set would
        // erase exactly the bounds that characterize the bug.
        let good = refine(&ip, &raw_good, &generator(), 17, 64, 1_000_000);
        build_spec(&good, &raw_good, &faulty, &input_only_vars(p), 2)
    }

    #[test]
    fn developer_patch_is_valid() {
        let buggy = parse(BUGGY).unwrap();
        let fixed = parse(FIXED).unwrap();
        let spec = derive_spec(&buggy);
        assert!(!spec.violated.is_empty());
        let v = validate_patch(&buggy, &fixed, &spec, &suite(), &generator(), 17, 64, 1_000_000)
            .unwrap();
        assert!(v.is_valid(), "stage {:?}, sema {:?}, pred {:?}", v.stage, v.sema, v.pred);
        let pred = v.pred.unwrap();
        let l2 = pred.bounds.iter().find(|(l, _, _)| l == "L2").unwrap();
        assert!(l2.2 < l2.1);
    }

    #[test]
    fn unpatched_original_fails() {
        // The unpatched program still fails the slow tests, so stage one
        // catches it and the verdict is invalid.
        let buggy = parse(BUGGY).unwrap();
        let spec = derive_spec(&buggy);
        let v = validate_patch(&buggy, &buggy, &spec, &suite(), &generator(), 17, 64, 1_000_000)
            .unwrap();
        assert_eq!(v.stage, Some(FailStage::FailedTests));
        assert!(!v.validity.valid);
    }

    #[test]
    fn functionally_wrong_candidate_fails_the_tests_stage() {
        let buggy = parse(BUGGY).unwrap();
        let wrong = parse("proc t(n: int) -> total { total := 0; }").unwrap();
        let spec = derive_spec(&buggy);
        let v = validate_patch(&buggy, &wrong, &spec, &suite(), &generator(), 17, 64, 1_000_000)
            .unwrap();
        assert_eq!(v.stage, Some(FailStage::FailedTests));
    }
}

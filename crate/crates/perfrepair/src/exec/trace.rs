//! Run results and execution traces sampled at entry, exit, and loop exits.

use crate::lang::{Label, COUNTER_PREFIX};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProgramPoint {
    Entry,
    /// Post-loop point, recorded each time the labeled loop finishes.
    LoopExit(Label),
    Exit,
}

impl fmt::Display for ProgramPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramPoint::Entry => write!(f, "entry"),
            ProgramPoint::LoopExit(l) => write!(f, "loop_exit:{l}"),
            ProgramPoint::Exit => write!(f, "exit"),
        }
    }
}

impl ProgramPoint {
    pub fn parse(s: &str) -> Option<ProgramPoint> {
        match s {
            "entry" => Some(ProgramPoint::Entry),
            "exit" => Some(ProgramPoint::Exit),
            other => other.strip_prefix("loop_exit:").map(|l| ProgramPoint::LoopExit(l.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    BudgetExhausted,
    RuntimeError,
    /// `input()` read past the end of the stream; treated as normal
    /// termination.
    InputExhausted,
}

impl RunStatus {
    /// Completed and InputExhausted leave the program in a well-defined final
    /// state with a recorded exit point.
    pub fn is_terminated(self) -> bool {
        matches!(self, RunStatus::Completed | RunStatus::InputExhausted)
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RunStatus::Completed => "completed",
            RunStatus::BudgetExhausted => "budget_exhausted",
            RunStatus::RuntimeError => "runtime_error",
            RunStatus::InputExhausted => "input_exhausted",
        };
        f.write_str(s)
    }
}

/// One valuation record per visited program point, in execution order.
/// Variable names are stored once; every record carries one value per name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub vars: Vec<String>,
    pub records: Vec<(ProgramPoint, Vec<i64>)>,
}

impl Trace {
    /// Line-oriented dump: `pointId TAB var=value TAB ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (point, values) in &self.records {
            out.push_str(&point.to_string());
            for (name, v) in self.vars.iter().zip(values) {
                out.push('\t');
                out.push_str(name);
                out.push('=');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Projection onto functional (non-counter) variables.
    pub fn functional(&self) -> Trace {
        let keep: Vec<usize> = (0..self.vars.len())
            .filter(|&i| !self.vars[i].starts_with(COUNTER_PREFIX))
            .collect();
        Trace {
            vars: keep.iter().map(|&i| self.vars[i].clone()).collect(),
            records: self
                .records
                .iter()
                .map(|(p, vals)| (p.clone(), keep.iter().map(|&i| vals[i]).collect()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    /// Declared outputs with their values when the run stopped.
    pub outputs: BTreeMap<String, i64>,
    /// Executed statement count; counter bookkeeping is free.
    pub steps: u64,
    pub trace: Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunClass {
    Fast,
    Slow {
        /// Wrong output or runtime error, as opposed to merely slow.
        functional_failure: bool,
    },
}

impl RunClass {
    pub fn is_fast(self) -> bool {
        matches!(self, RunClass::Fast)
    }
}

/// Fast iff the run terminated normally with the expected outputs within the
/// step threshold; anything else is Slow. Wrong-output and erroring runs are
/// flagged as functional failures.
pub fn classify(r: &RunResult, expected: &BTreeMap<String, i64>, threshold: u64) -> RunClass {
    let outputs_ok = r.status.is_terminated() && &r.outputs == expected;
    if outputs_ok && r.steps <= threshold {
        RunClass::Fast
    } else {
        RunClass::Slow {
            functional_failure: r.status == RunStatus::RuntimeError
                || (r.status.is_terminated() && !outputs_ok),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_with(steps: u64, status: RunStatus, out: i64) -> RunResult {
        RunResult {
            status,
            outputs: [("x".to_string(), out)].into(),
            steps,
            trace: Trace { vars: vec![], records: vec![] },
        }
    }

    #[test]
    fn classify_fast_and_slow() {
        let expected: BTreeMap<String, i64> = [("x".to_string(), 3)].into();
        assert_eq!(classify(&run_with(8, RunStatus::Completed, 3), &expected, 100), RunClass::Fast);
        assert_eq!(
            classify(&run_with(100_000, RunStatus::Completed, 3), &expected, 1_000),
            RunClass::Slow { functional_failure: false }
        );
        assert_eq!(
            classify(&run_with(8, RunStatus::Completed, 4), &expected, 100),
            RunClass::Slow { functional_failure: true }
        );
    }

    #[test]
    fn point_display_round_trips() {
        for p in [
            ProgramPoint::Entry,
            ProgramPoint::Exit,
            ProgramPoint::LoopExit("L6".to_string()),
        ] {
            assert_eq!(ProgramPoint::parse(&p.to_string()), Some(p));
        }
    }
}

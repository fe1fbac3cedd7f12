//! Deterministic tracing interpreter, loop-counter instrumentation, and
//! fast/slow run classification.

pub mod input;
mod instrument;
mod interp;
mod trace;

pub use input::{ArrayDomain, GeneratorSpec, ProgramInput, ScalarDomain};
pub use instrument::instrument;
pub use interp::{compile, run, Compiled, ExecError};
pub use trace::{classify, ProgramPoint, RunClass, RunResult, RunStatus, Trace};

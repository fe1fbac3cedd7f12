//! Invariant-guided automated repair of loop performance bugs.
//!
//! The pipeline: instrument a program with loop-iteration counters, run it on
//! a fast/slow test suite, infer likely invariants separately from passing
//! and failing runs, refine them against generated inputs, localize suspicious
//! statements from the violated invariants, search for statement-level
//! patches genetically, and accept only patches that keep the functional
//! invariants intact while strictly shrinking loop-iteration bounds.

pub mod exec;
pub mod harness;
pub mod invariants;
pub mod lang;
pub mod repair;
pub mod validate;

//! Invariant-guided fault localization and genetic patch search.

mod localize;
mod mutation;
mod search;

pub use localize::localize;
pub use mutation::{apply_mutation, apply_patch, Anchor, Mutation, MutationError};
pub use search::{search, Candidate, Fitness, SearchConfig, SearchOutcome, TestCase};

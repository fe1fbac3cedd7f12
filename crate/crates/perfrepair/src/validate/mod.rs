//! Patch acceptance: functional-invariant equivalence, strict loop-bound
//! improvement, and the staged validity verdict.

mod pipeline;
mod predsm;
mod semaeq;
mod validity;

pub use pipeline::{validate_patch, FailStage, ValidateError, Verdict};
pub use predsm::{pred_sm, PredSmError, PredSmReport};
pub use semaeq::{sema_eq, SemaEqReport, Side};
pub use validity::{check_validity, ValidityReport};

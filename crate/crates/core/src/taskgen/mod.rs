//! Synthetic tasks with planted ground truth, and the evaluator.

mod eval;
mod generate;
mod instance;

pub use eval::*;
pub use generate::*;
pub use instance::*;

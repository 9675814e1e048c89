//! Differential forms on chart domains.

mod field;
mod value;

pub use field::{sup_distance, Evaluator, FormField, PartialsFn};
pub use value::*;

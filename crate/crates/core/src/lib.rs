//! Layered symbolic encoding of six-axis force/torque recordings.
//!
//! Noisy wrench signals are partitioned into linear primitives, aggregated
//! into motion compositions and low-level behaviors, filtered into a compact
//! action grammar per task phase, and classified with a one-vs-one kernel
//! SVM or an online Mondrian forest.

pub mod behaviors;
pub mod compositions;
pub mod error;
pub mod grammar;
pub mod mondrian;
pub mod primitives;
pub mod refinement;
pub mod signal;
pub mod svm;
pub mod synth;

pub use error::{Error, Result};

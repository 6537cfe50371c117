//! Post-training quantization of neural-network layers by kernel-walk
//! pre-processing followed by memoryless scalar quantization.
//!
//! A neuron `w` is first replaced by `ŵ` with the same action on the training
//! data (`Xᵀŵ = Xᵀw`) but with all except at most `m` entries at magnitude
//! `c = ‖w‖_∞`. Rounding `ŵ` to a uniform alphabet on `[−c, c]` then only
//! perturbs the few unsaturated entries.

extern crate self as satquant;

pub mod analysis;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod linf;
pub mod par;
pub mod pipeline;
pub mod preprocess;
pub mod quantizer;
pub mod seeding;

#[cfg(test)]
mod oracle;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector};
pub use par::Execution;
pub use pipeline::Method;

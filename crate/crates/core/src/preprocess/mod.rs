//! Kernel-walk pre-processing of a single neuron.
//!
//! Given data `A₀` (`m × n`) and weights `w`, the walk moves `z` inside
//! `w + ker(A₀)` and stops once at most `m` entries of `z` are below the cap
//! `c` in magnitude. Entries that reach `±c` are clamped exactly and never move
//! again, so they quantize with zero error on any alphabet whose extreme
//! elements are `±c`.

mod contract;
mod kernel;
mod walk;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseMatrix, DenseVector};

pub use contract::{verify_preprocess_contract, ContractReport};
pub use kernel::{restricted_kernel_vector, saturation_step, KernelStep};
pub use walk::REFACTOR_INTERVAL;

/// An entry counts as saturated once `|z_i| ≥ c·(1 − SATURATION_RTOL)`.
pub const SATURATION_RTOL: f64 = 1e-12;

/// Data-consistency tolerance: `‖A₀ŵ − A₀w‖₂ ≤ RESIDUAL_RTOL·(1 + ‖A₀w‖₂)`.
pub const RESIDUAL_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Baseline,
    Accelerated,
    Linf,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Baseline, Method::Accelerated, Method::Linf];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::Accelerated => "accelerated",
            Method::Linf => "linf",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(Method::Baseline),
            "accelerated" => Ok(Method::Accelerated),
            "linf" => Ok(Method::Linf),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Snapshot after one walk step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub saturated_count: usize,
    pub linf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessResult {
    pub w_hat: DenseVector,
    /// Indices with `|ŵ_i| = c`, ascending.
    pub saturated: Vec<usize>,
    pub iterations: usize,
    /// `‖A₀ŵ − A₀w‖₂`.
    pub data_residual: f64,
    pub method: Method,
    pub cap: f64,
    /// The accelerated walk handed over to the baseline walk at some point.
    pub fell_back: bool,
}

impl PreprocessResult {
    pub fn unsaturated_count(&self) -> usize {
        self.w_hat.dim() - self.saturated.len()
    }

    pub(crate) fn assemble(
        a0: &DenseMatrix,
        w: &[f64],
        w_hat: Vec<f64>,
        iterations: usize,
        method: Method,
        cap: f64,
        fell_back: bool,
    ) -> Self {
        let saturated = (0..w_hat.len()).filter(|&i| w_hat[i].abs() == cap).collect();
        let data_residual = data_residual(a0, w, &w_hat);
        Self {
            w_hat: DenseVector::from(w_hat),
            saturated,
            iterations,
            data_residual,
            method,
            cap,
            fell_back,
        }
    }
}

/// `‖A₀ŵ − A₀w‖₂`.
pub fn data_residual(a0: &DenseMatrix, w: &[f64], w_hat: &[f64]) -> f64 {
    let diff: Vec<f64> = w_hat.iter().zip(w).map(|(a, b)| a - b).collect();
    norm2(&a0.matvec(&diff))
}

fn residual_ok(a0: &DenseMatrix, w: &[f64], result: &PreprocessResult) -> bool {
    result.data_residual <= RESIDUAL_RTOL * (1.0 + norm2(&a0.matvec(w)))
}

/// Walks along restricted-kernel directions until at most `m`
/// entries remain strictly inside `(−c, c)`.
pub fn preprocess_baseline(a0: &DenseMatrix, w: &[f64], c: f64) -> Result<PreprocessResult> {
    let mut walk = walk::Walk::new(a0, w, c, false)?;
    walk.run_baseline()?;
    Ok(PreprocessResult::assemble(a0, w, walk.z, walk.iterations, Method::Baseline, c, false))
}

/// The walk with an explicitly maintained basis inverse and rank-one column
/// exchanges. Falls back to a fresh factorization and then to
/// [`preprocess_baseline`] when the columns are not in general position or the
/// accumulated residual exceeds the contract tolerance.
pub fn preprocess_accelerated(a0: &DenseMatrix, w: &[f64], c: f64) -> Result<PreprocessResult> {
    let mut walk = walk::Walk::new(a0, w, c, false)?;
    let finished = walk.run_accelerated()?;
    let result = PreprocessResult::assemble(
        a0,
        w,
        walk.z,
        walk.iterations,
        Method::Accelerated,
        c,
        !finished,
    );
    if residual_ok(a0, w, &result) {
        return Ok(result);
    }
    let mut redo = preprocess_baseline(a0, w, c)?;
    redo.method = Method::Accelerated;
    redo.fell_back = true;
    Ok(redo)
}

/// Runs the baseline or accelerated walk and also returns the per-step trace.
pub fn preprocess_traced(
    a0: &DenseMatrix,
    w: &[f64],
    c: f64,
    method: Method,
) -> Result<(PreprocessResult, Vec<StepRecord>)> {
    let mut walk = walk::Walk::new(a0, w, c, true)?;
    let fell_back = match method {
        Method::Baseline => {
            walk.run_baseline()?;
            false
        }
        Method::Accelerated => !walk.run_accelerated()?,
        Method::Linf => {
            return Err(Error::InvalidParameter(
                "the linf route has no kernel-walk trace".into(),
            ))
        }
    };
    let trace = walk.trace.take().unwrap_or_default();
    let result =
        PreprocessResult::assemble(a0, w, walk.z, walk.iterations, method, c, fell_back);
    Ok((result, trace))
}

use serde::{Deserialize, Serialize};

use super::{data_residual, Method, PreprocessResult, RESIDUAL_RTOL};
use crate::linalg::{norm2, norm_inf, DenseMatrix};

/// Pass/fail for each clause of the pre-processing postcondition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractReport {
    pub residual: f64,
    pub residual_tolerance: f64,
    pub residual_ok: bool,
    pub linf: f64,
    pub linf_ok: bool,
    pub unsaturated: usize,
    pub sparsity_ok: bool,
    pub iterations_ok: bool,
}

impl ContractReport {
    pub fn all_passed(&self) -> bool {
        self.residual_ok && self.linf_ok && self.sparsity_ok && self.iterations_ok
    }
}

/// Checks `A₀ŵ = A₀w` (relative `1e−8`), `‖ŵ‖_∞ = c` exactly, at most `m`
/// entries with `|ŵ_i| < c`, and `iterations ≤ max(0, n − m)` for the walks.
///
/// The residual is recomputed from `result.w_hat`, so a corrupted vector is
/// caught even when the stored diagnostics are stale. Never fails; every
/// violation shows up as a `false` clause.
pub fn verify_preprocess_contract(
    a0: &DenseMatrix,
    w: &[f64],
    result: &PreprocessResult,
    c: f64,
    m: usize,
) -> ContractReport {
    let w_hat = result.w_hat.as_slice();
    let shapes_ok = w_hat.len() == w.len() && a0.cols() == w.len();
    let residual = if shapes_ok {
        data_residual(a0, w, w_hat)
    } else {
        f64::INFINITY
    };
    let residual_tolerance = if shapes_ok {
        RESIDUAL_RTOL * (1.0 + norm2(&a0.matvec(w)))
    } else {
        0.0
    };
    let linf = norm_inf(w_hat);
    let unsaturated = w_hat.iter().filter(|x| x.abs() < c).count();
    ContractReport {
        residual,
        residual_tolerance,
        residual_ok: residual <= residual_tolerance,
        linf,
        linf_ok: linf == c,
        unsaturated,
        sparsity_ok: unsaturated <= m,
        // Simplex pivots are not kernel-walk steps; the bound applies to the walks only.
        iterations_ok: result.method == Method::Linf
            || result.iterations <= w.len().saturating_sub(m),
    }
}

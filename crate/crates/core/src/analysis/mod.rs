//! Data-complexity parameter Γ, error reports against the deterministic and
//! Gaussian-rate bounds, and empirical scaling fits.
//!
//! `Γ(X)` is the largest spectral norm of `Xᵀ` restricted to `m` columns.
//! Since a pre-processed neuron differs from its quantization on at most `m`
//! entries, `‖Xᵀ(w − q)‖₂ ≤ Γ(X)·√m·δ` for an alphabet with worst-case
//! distortion `δ`.

mod bounds;
mod gamma;
mod scaling;

pub use bounds::{
    evaluate_bounds, evaluate_bounds_with, generalization_check, ErrorReport,
    GeneralizationReport, BOUND_RTOL,
};
pub use gamma::{
    binomial, gamma_bounds, gamma_bounds_with_limit, gamma_exact, gamma_exact_with_guard,
    GammaEstimate, AUTO_EXACT_LIMIT, EXACT_GUARD,
};
pub use scaling::{fit_scaling, ScalingAxis, ScalingFit, MIN_POINTS};

//! The ℓ∞ route: minimum-ℓ∞ neurons and the layer-level tie-breaking program.
//!
//! A vertex solution of `min ‖z‖_∞ s.t. A z = y` has at least `n − m + 1`
//! entries at magnitude `‖z‖_∞`, so like the kernel walk it leaves at most
//! `m − 1` entries strictly inside the cap. For a layer, stage 1 finds the
//! shared cap `Ĉ` as the largest per-neuron minimum and stage 2 re-solves
//! each neuron as `min aᵀz s.t. ‖z‖_∞ ≤ Ĉ, A z = A w` with a random
//! tie-breaking vector `a`, which pushes every neuron onto the cap.

mod simplex;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseMatrix, DenseVector};
use crate::par::{map_indexed, Execution};
use crate::seeding;

pub use simplex::{
    default_iteration_limit, lp_solve_standard_form, lp_solve_with_limit, LpSolution,
    StandardFormLP,
};

/// Entries within `CLAMP_RTOL·cap` of the cap are snapped onto it.
pub const CLAMP_RTOL: f64 = 1e-10;

/// Tie-breaking vectors drawn per neuron before giving up.
pub const MAX_REDRAWS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinfSolution {
    pub z_star: DenseVector,
    pub value: f64,
    pub saturated_count: usize,
    pub iterations: usize,
}

/// Snaps near-cap entries onto `±cap` and counts them.
fn clamp_to_cap(z: &mut [f64], cap: f64) -> usize {
    let threshold = cap * (1.0 - CLAMP_RTOL);
    let mut count = 0;
    for v in z.iter_mut() {
        if v.abs() >= threshold {
            *v = cap.copysign(*v);
            count += 1;
        }
    }
    count
}

fn check_shapes(xt: &DenseMatrix, w: &[f64]) -> Result<()> {
    if xt.cols() != w.len() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} columns, neuron has {} entries",
            xt.cols(),
            w.len()
        )));
    }
    if let Some(i) = w.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

/// `argmin ‖z‖_∞ s.t. Xᵀz = Xᵀw`, as a simplex vertex.
pub fn linf_minimize(xt: &DenseMatrix, w: &[f64]) -> Result<LinfSolution> {
    check_shapes(xt, w)?;
    let n = w.len();
    let y = xt.matvec(w);
    let lp = StandardFormLP::linf(xt, &y)?;
    let sol = lp_solve_standard_form(&lp)?;
    let mut z: Vec<f64> = (0..n).map(|i| 0.5 * (sol.x[n + i] - sol.x[i])).collect();
    let value = crate::linalg::norm_inf(&z);
    let saturated_count = if value > 0.0 { clamp_to_cap(&mut z, value) } else { n };
    Ok(LinfSolution {
        z_star: DenseVector::from(z),
        value,
        saturated_count,
        iterations: sol.iterations,
    })
}

/// `argmin aᵀz s.t. ‖z‖_∞ ≤ cap, Xᵀz = Xᵀw`.
///
/// With `z = p − cap·1` the box becomes `p + s = 2cap·1`, `p, s ≥ 0`, and the
/// data constraint `Xᵀp = Xᵀw + cap·Xᵀ1`.
pub fn box_tiebreak(
    xt: &DenseMatrix,
    w: &[f64],
    a: &[f64],
    cap: f64,
) -> Result<LinfSolution> {
    check_shapes(xt, w)?;
    if a.len() != w.len() {
        return Err(Error::DimensionMismatch("tie-breaking vector length".into()));
    }
    let (m, n) = xt.shape();
    let mut big = DenseMatrix::zeros(m + n, 2 * n);
    for i in 0..m {
        big.row_mut(i)[..n].copy_from_slice(xt.row(i));
    }
    for i in 0..n {
        big[(m + i, i)] = 1.0;
        big[(m + i, n + i)] = 1.0;
    }
    let ones = vec![1.0; n];
    let mut rhs: Vec<f64> = xt
        .matvec(w)
        .iter()
        .zip(xt.matvec(&ones))
        .map(|(y, s)| y + cap * s)
        .collect();
    rhs.resize(m + n, 2.0 * cap);
    let mut cost = a.to_vec();
    cost.resize(2 * n, 0.0);
    let lp = StandardFormLP::new(big, rhs, cost)?;
    let sol = lp_solve_standard_form(&lp)?;
    let mut z: Vec<f64> = (0..n).map(|i| (sol.x[i] - cap).clamp(-cap, cap)).collect();
    let saturated_count = clamp_to_cap(&mut z, cap);
    let value = crate::linalg::norm_inf(&z);
    Ok(LinfSolution {
        z_star: DenseVector::from(z),
        value,
        saturated_count,
        iterations: sol.iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerLinfResult {
    /// Shared cap: the largest stage-1 minimum.
    pub c_hat: f64,
    /// Stage-2 neurons as columns.
    pub w_hat: DenseMatrix,
    pub stage1: Vec<LinfSolution>,
    pub stage2: Vec<LinfSolution>,
    /// Tie-breaking vectors drawn per neuron (1 when the first draw worked).
    pub draws: Vec<usize>,
}

pub fn layer_linf_preprocess(xt: &DenseMatrix, w: &DenseMatrix, seed: u64) -> Result<LayerLinfResult> {
    layer_linf_preprocess_with(xt, w, seed, Execution::default())
}

/// Two-stage ℓ∞ pre-processing of every column of `w`.
pub fn layer_linf_preprocess_with(
    xt: &DenseMatrix,
    w: &DenseMatrix,
    seed: u64,
    exec: Execution,
) -> Result<LayerLinfResult> {
    let (m, n0) = xt.shape();
    if w.rows() != n0 {
        return Err(Error::DimensionMismatch(format!(
            "data has {n0} columns, weights have {} rows",
            w.rows()
        )));
    }
    if w.cols() == 0 {
        return Err(Error::InvalidDims("layer has no neurons".into()));
    }
    let n1 = w.cols();
    let stage1: Vec<LinfSolution> = map_indexed(exec, n1, |j| linf_minimize(xt, &w.column(j)))
        .into_iter()
        .collect::<Result<_>>()?;
    let c_hat = stage1.iter().map(|s| s.value).fold(0.0, f64::max);
    if c_hat == 0.0 {
        return Ok(LayerLinfResult {
            c_hat,
            w_hat: DenseMatrix::zeros(n0, n1),
            stage2: stage1.clone(),
            stage1,
            draws: vec![0; n1],
        });
    }
    let needed = n0.saturating_sub(m);
    let stage2: Vec<(LinfSolution, usize)> = map_indexed(exec, n1, |j| {
        let col = w.column(j);
        let y = xt.matvec(&col);
        let tol = 1e-8 * (1.0 + norm2(&y));
        for draw in 0..MAX_REDRAWS {
            let mut rng = seeding::stream(seed, &[j as u64, draw as u64]);
            let a: Vec<f64> = (0..n0).map(|_| StandardNormal.sample(&mut rng)).collect();
            let sol = box_tiebreak(xt, &col, &a, c_hat)?;
            let resid: Vec<f64> = xt
                .matvec(&sol.z_star)
                .iter()
                .zip(&y)
                .map(|(a, b)| a - b)
                .collect();
            if sol.saturated_count >= needed && sol.value == c_hat && norm2(&resid) <= tol {
                return Ok((sol, draw + 1));
            }
        }
        Err(Error::DegenerateTieBreaker(MAX_REDRAWS))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut w_hat = DenseMatrix::zeros(n0, n1);
    for (j, (s, _)) in stage2.iter().enumerate() {
        w_hat.set_column(j, &s.z_star);
    }
    let (stage2, draws) = stage2.into_iter().unzip();
    Ok(LayerLinfResult {
        c_hat,
        w_hat,
        stage1,
        stage2,
        draws,
    })
}

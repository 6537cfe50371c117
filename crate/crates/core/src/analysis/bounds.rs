use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::gamma::{gamma_bounds, GammaEstimate};
use crate::error::{Error, Result};
use crate::linalg::{norm2, norm_inf, DenseMatrix};
use crate::quantizer::{worst_case_distortion, Alphabet};
use crate::seeding;

/// Relative slack on the deterministic bound. The bound holds with equality on
/// some inputs, so the comparison must tolerate rounding in the measurement.
pub const BOUND_RTOL: f64 = 1e-9;

/// Monte-Carlo subsets drawn for the lower Γ estimate in [`evaluate_bounds`].
const GAMMA_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `‖XᵀW − XᵀQ‖_F`.
    pub absolute: f64,
    /// `absolute / ‖XᵀW‖_F` (zero when both vanish).
    pub relative: f64,
    /// `Γ·√(N₁·min(m, N₀))·δ` with the exact worst-case distortion `δ`.
    pub bound_deterministic: f64,
    /// Unit-constant relative prediction `2^{−B}·√(N₁·m·ln N₀)·‖W‖_∞/‖W‖_F`.
    pub bound_gaussian: f64,
    /// The Γ value inside `bound_deterministic`.
    pub gamma_used: f64,
    pub gamma: GammaEstimate,
    pub bits: Option<u32>,
    pub m: usize,
    pub n0: usize,
    pub n1: usize,
    pub seed: u64,
}

impl ErrorReport {
    pub fn within_bound(&self) -> bool {
        self.absolute <= self.bound_deterministic * (1.0 + BOUND_RTOL)
    }
}

pub fn evaluate_bounds(
    xt: &DenseMatrix,
    w: &DenseMatrix,
    q: &DenseMatrix,
    alphabet: &Alphabet,
) -> Result<ErrorReport> {
    let gamma = gamma_bounds(xt, GAMMA_SAMPLES, 0);
    evaluate_bounds_with(xt, w, q, alphabet, &gamma, 0)
}

/// Measured errors against the deterministic and Gaussian-rate bounds.
///
/// Uses the exact Γ when `gamma` carries it and the full spectral norm
/// otherwise. Fails with [`Error::BoundViolated`] when the measured error
/// exceeds the deterministic bound, which can only happen through a bug.
pub fn evaluate_bounds_with(
    xt: &DenseMatrix,
    w: &DenseMatrix,
    q: &DenseMatrix,
    alphabet: &Alphabet,
    gamma: &GammaEstimate,
    seed: u64,
) -> Result<ErrorReport> {
    let (m, n0) = xt.shape();
    if w.shape() != q.shape() || w.rows() != n0 {
        return Err(Error::DimensionMismatch(format!(
            "data {}x{}, weights {}x{}, quantized {}x{}",
            m,
            n0,
            w.rows(),
            w.cols(),
            q.rows(),
            q.cols()
        )));
    }
    let n1 = w.cols();
    let xw = xt.matmul(w)?;
    let xq = xt.matmul(q)?;
    let absolute = xw.sub(&xq)?.frobenius();
    let reference = xw.frobenius();
    let relative = if reference > 0.0 { absolute / reference } else { 0.0 };

    let delta = worst_case_distortion(alphabet).worst_case;
    let gamma_used = gamma.best_upper();
    let k = m.min(n0) as f64;
    let bound_deterministic = gamma_used * (n1 as f64 * k).sqrt() * delta;

    let wf = w.frobenius();
    let bound_gaussian = match alphabet.bits() {
        Some(b) if wf > 0.0 && n0 > 1 => {
            2f64.powi(-(b as i32)) * (n1 as f64 * m as f64 * (n0 as f64).ln()).sqrt() * w.max_abs()
                / wf
        }
        _ => f64::NAN,
    };

    let report = ErrorReport {
        absolute,
        relative,
        bound_deterministic,
        bound_gaussian,
        gamma_used,
        gamma: gamma.clone(),
        bits: alphabet.bits(),
        m,
        n0,
        n1,
        seed,
    };
    if !report.within_bound() {
        return Err(Error::BoundViolated {
            measured: absolute,
            bound: bound_deterministic,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationReport {
    /// `max |zᵀ(w − q)| / (‖z‖₂‖w‖_∞)` over the sampled `z`.
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// Unit-constant rate `2^{−B}·m·√(ln N₀)/(√N₀ − √m)`.
    pub rate: f64,
    pub trials: usize,
}

/// Samples `z = X h` with Gaussian `h` (so `z` lies in the span of the data)
/// and measures how well `q` reproduces `w` on those unseen points.
pub fn generalization_check(
    xt: &DenseMatrix,
    w: &[f64],
    q: &[f64],
    bits: u32,
    trials: usize,
    seed: u64,
) -> Result<GeneralizationReport> {
    let (m, n0) = xt.shape();
    if w.len() != n0 || q.len() != n0 {
        return Err(Error::DimensionMismatch(format!(
            "data has {n0} columns, w has {}, q has {}",
            w.len(),
            q.len()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let d: Vec<f64> = w.iter().zip(q).map(|(a, b)| a - b).collect();
    let scale = norm_inf(w);
    let mut rng = seeding::stream(seed, &[0x9e]);
    let mut max_ratio = 0.0_f64;
    let mut sum = 0.0;
    let mut used = 0usize;
    while used < trials {
        let h: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let z = xt.tr_matvec(&h);
        let zn = norm2(&z);
        if zn == 0.0 {
            if xt.max_abs() == 0.0 {
                return Err(Error::InvalidParameter("data matrix is zero".into()));
            }
            continue;
        }
        let dot: f64 = z.iter().zip(&d).map(|(a, b)| a * b).sum();
        let ratio = if scale > 0.0 { dot.abs() / (zn * scale) } else { 0.0 };
        max_ratio = max_ratio.max(ratio);
        sum += ratio;
        used += 1;
    }
    let (nf, mf) = (n0 as f64, m as f64);
    let rate = if nf > mf {
        2f64.powi(-(bits as i32)) * mf * nf.ln().sqrt() / (nf.sqrt() - mf.sqrt())
    } else {
        f64::INFINITY
    };
    Ok(GeneralizationReport {
        max_ratio,
        mean_ratio: sum / trials as f64,
        rate,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::pipeline::{quantize_layer, quantize_neuron, Method};
    use crate::quantizer::build_uniform_bbit;

    #[test]
    fn exact_copy_has_zero_error() {
        let mut rng = oracle::rng(71);
        let xt = oracle::gaussian_matrix(&mut rng, 2, 6);
        let w = oracle::gaussian_matrix(&mut rng, 6, 2);
        let a = build_uniform_bbit(2, w.max_abs()).unwrap();
        let r = evaluate_bounds(&xt, &w, &w, &a).unwrap();
        assert_eq!(r.absolute, 0.0);
        assert_eq!(r.relative, 0.0);
    }

    #[test]
    fn hand_example_is_tight() {
        let xt = DenseMatrix::from_rows(&[[1.0, 1.0, 1.0]]).unwrap();
        let w = [0.1, 0.2, 0.3];
        let (q, _) = quantize_neuron(&xt, &w, 1, Method::Baseline).unwrap();
        let wm = DenseMatrix::from_columns(&[&w]).unwrap();
        let qm = DenseMatrix::from_columns(&[q.as_slice()]).unwrap();
        let a = build_uniform_bbit(1, 0.3).unwrap();
        let r = evaluate_bounds(&xt, &wm, &qm, &a).unwrap();
        assert!((r.absolute - 0.3).abs() <= 1e-12);
        assert!((r.bound_deterministic - 0.3).abs() <= 1e-12);
        assert_eq!(r.gamma.exact, Some(1.0));
    }

    #[test]
    fn violation_is_reported() {
        let xt = DenseMatrix::from_rows(&[[1.0, 1.0, 1.0]]).unwrap();
        let w = DenseMatrix::from_columns(&[[0.3, 0.3, 0.3]]).unwrap();
        let q = DenseMatrix::from_columns(&[[-0.3, -0.3, -0.3]]).unwrap();
        let a = build_uniform_bbit(1, 0.3).unwrap();
        assert!(matches!(evaluate_bounds(&xt, &w, &q, &a), Err(Error::BoundViolated { .. })));
    }

    #[test]
    fn layer_bound_holds() {
        let mut rng = oracle::rng(72);
        for _ in 0..5 {
            let xt = oracle::gaussian_matrix(&mut rng, 4, 64);
            let w = DenseMatrix::new(64, 4, oracle::uniform_vec(&mut rng, 256, -1.0, 1.0)).unwrap();
            let r = quantize_layer(&xt, &w, 3, Method::Accelerated).unwrap();
            let rep = evaluate_bounds(&xt, &w, &r.q, &r.alphabet).unwrap();
            assert!(rep.absolute <= rep.bound_deterministic);
            assert!(rep.bound_gaussian.is_finite());
        }
    }

    #[test]
    fn training_columns_and_identity() {
        let mut rng = oracle::rng(73);
        let xt = oracle::gaussian_matrix(&mut rng, 3, 30);
        let w = oracle::uniform_vec(&mut rng, 30, -1.0, 1.0);
        let (q, _) = quantize_neuron(&xt, &w, 2, Method::Baseline).unwrap();
        let g = generalization_check(&xt, &w, &w, 2, 10, 0).unwrap();
        assert_eq!(g.max_ratio, 0.0);
        // A training point x_i is a row of Xᵀ: its error is one residual coordinate.
        let d: Vec<f64> = w.iter().zip(q.iter()).map(|(a, b)| a - b).collect();
        let res = norm2(&xt.matvec(&d));
        for i in 0..3 {
            let e: f64 = xt.row(i).iter().zip(&d).map(|(a, b)| a * b).sum();
            assert!(e.abs() <= res + 1e-12);
        }
        let g = generalization_check(&xt, &w, &q, 2, 25, 4).unwrap();
        assert!(g.max_ratio.is_finite() && g.mean_ratio <= g.max_ratio);
    }
}

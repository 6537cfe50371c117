use serde::{Deserialize, Serialize};

use super::SATURATION_RTOL;
use crate::error::{Error, Result};
use crate::linalg::{rref_kernel, DenseMatrix, DenseVector};

/// One move of the kernel walk: `z ← z + α·b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelStep {
    pub direction: DenseVector,
    pub alpha: f64,
    pub newly_saturated: Vec<usize>,
}

impl KernelStep {
    /// Applies the step to `z`, clamping every newly saturated entry to `±c`.
    pub fn apply(&self, z: &[f64], c: f64) -> Vec<f64> {
        let mut out: Vec<f64> = z
            .iter()
            .zip(self.direction.iter())
            .map(|(zi, bi)| zi + self.alpha * bi)
            .collect();
        for &i in &self.newly_saturated {
            out[i] = c.copysign(out[i]);
        }
        out
    }
}

/// A nonzero `b ∈ ker(A0)` supported on `free`, scaled to `‖b‖_∞ = 1`.
///
/// Works on the first `m + 1` free columns, widening the working set while the
/// selected columns are numerically independent.
pub fn restricted_kernel_vector(a0: &DenseMatrix, free: &[usize]) -> Result<DenseVector> {
    let (m, n) = a0.shape();
    if let Some(&bad) = free.iter().find(|&&i| i >= n) {
        return Err(Error::DimensionMismatch(format!("free index {bad} out of range for {n} columns")));
    }
    let mut width = (m + 1).min(free.len());
    loop {
        let cols = &free[..width];
        if let Some(compact) = rref_kernel(&a0.select_columns(cols)) {
            let mut b = vec![0.0; n];
            for (k, &i) in cols.iter().enumerate() {
                b[i] = compact[k];
            }
            return Ok(DenseVector::from(b));
        }
        if width == free.len() {
            return Err(Error::NoKernelVector);
        }
        width += 1;
    }
}

/// Moves `z` along `b` (given on `working` only) to the first positive
/// crossing of `±c`, clamping the coordinates that saturate. Returns the step
/// length and leaves the saturated positions (into `working`) in
/// `saturated_positions`.
pub(crate) fn step_on_working_set(
    z: &mut [f64],
    working: &[usize],
    b: &[f64],
    c: f64,
    saturated_positions: &mut Vec<usize>,
) -> Result<f64> {
    let mut alpha = f64::INFINITY;
    let mut leader = usize::MAX;
    for (k, (&i, &bk)) in working.iter().zip(b).enumerate() {
        if bk == 0.0 {
            continue;
        }
        let gap = if bk > 0.0 { c - z[i] } else { c + z[i] };
        let t = gap.max(0.0) / bk.abs();
        if t < alpha {
            alpha = t;
            leader = k;
        }
    }
    if leader == usize::MAX {
        return Err(Error::NoCrossing);
    }
    let threshold = c * (1.0 - SATURATION_RTOL);
    saturated_positions.clear();
    for (k, (&i, &bk)) in working.iter().zip(b).enumerate() {
        let v = if k == leader {
            c.copysign(bk)
        } else {
            z[i] + alpha * bk
        };
        if v.abs() >= threshold {
            z[i] = c.copysign(v);
            saturated_positions.push(k);
        } else {
            z[i] = v;
        }
    }
    Ok(alpha)
}

/// Smallest `α > 0` at which some free coordinate of `z + α·b` reaches `±c`.
pub fn saturation_step(z: &[f64], b: &[f64], c: f64, saturated: &[usize]) -> Result<KernelStep> {
    if z.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "z has {} entries, b has {}",
            z.len(),
            b.len()
        )));
    }
    let mut is_sat = vec![false; z.len()];
    for &i in saturated {
        if i < z.len() {
            is_sat[i] = true;
        }
    }
    let working: Vec<usize> = (0..z.len()).filter(|&i| !is_sat[i]).collect();
    let compact: Vec<f64> = working.iter().map(|&i| b[i]).collect();
    let mut moved = z.to_vec();
    let mut positions = Vec::new();
    let alpha = step_on_working_set(&mut moved, &working, &compact, c, &mut positions)?;
    let mut direction = vec![0.0; z.len()];
    for &i in &working {
        direction[i] = b[i];
    }
    Ok(KernelStep {
        direction: DenseVector::from(direction),
        alpha,
        newly_saturated: positions.iter().map(|&k| working[k]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::oracle;

    #[test]
    fn one_row_kernel() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0, 1.0]]).unwrap();
        let b = restricted_kernel_vector(&a, &[0, 1]).unwrap();
        assert_eq!(b.as_slice(), &[1.0, -1.0, 0.0]);
    }

    #[test]
    fn zero_column_kernel() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let b = restricted_kernel_vector(&a, &[0, 1, 2]).unwrap();
        assert_eq!(b.as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn gaussian_kernel_residual() {
        let mut rng = oracle::rng(8);
        for _ in 0..20 {
            let a = oracle::gaussian_matrix(&mut rng, 3, 5);
            let b = restricted_kernel_vector(&a, &[0, 1, 2, 3, 4]).unwrap();
            assert_eq!(b.norm_inf(), 1.0);
            assert!(norm2(&a.matvec(&b)) <= 1e-10 * a.frobenius() * b.norm2());
            // Only the first m + 1 columns are used.
            assert_eq!(b[4], 0.0);
        }
    }

    #[test]
    fn independent_free_columns_have_no_kernel() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 2.0], [0.0, 1.0, 3.0]]).unwrap();
        let b = restricted_kernel_vector(&a, &[0, 1]);
        assert_eq!(b, Err(Error::NoKernelVector));
        let b = restricted_kernel_vector(&a, &[0, 2]).unwrap_err();
        assert_eq!(b, Error::NoKernelVector);
        let b = restricted_kernel_vector(&a, &[0, 1, 2]).unwrap();
        assert!(norm2(&a.matvec(&b)) < 1e-14);
    }

    #[test]
    fn step_examples() {
        let s = saturation_step(&[0.1, 0.2, 0.3], &[1.0, -1.0, 0.0], 0.3, &[2]).unwrap();
        assert!((s.alpha - 0.2).abs() < 1e-15);
        assert_eq!(s.newly_saturated, vec![0]);
        let z = s.apply(&[0.1, 0.2, 0.3], 0.3);
        assert_eq!(z[0], 0.3);
        assert!(z[1].abs() < 1e-15);

        let s = saturation_step(&[0.0, 0.0], &[1.0, 0.0], 1.0, &[]).unwrap();
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.newly_saturated, vec![0]);

        let s = saturation_step(&[0.5, -0.2], &[1.0, 1.0], 1.0, &[]).unwrap();
        assert_eq!(s.alpha, 0.5);
        let z = s.apply(&[0.5, -0.2], 1.0);
        assert_eq!(z[0], 1.0);
        assert!((z[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn step_without_free_support_fails() {
        let e = saturation_step(&[0.1, 0.2], &[1.0, 0.0], 1.0, &[0]).unwrap_err();
        assert_eq!(e, Error::NoCrossing);
    }
}

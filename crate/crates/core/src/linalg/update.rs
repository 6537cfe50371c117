use super::DenseMatrix;
use crate::error::{Error, Result};

/// Smallest admissible Sherman–Morrison denominator magnitude.
pub const DENOMINATOR_TOL: f64 = 1e-12;

/// Inverse of `A + u·e_jᵀ` given `A⁻¹` (Sherman–Morrison).
///
/// Replacing column `j` of `A` by a new column `a` is the update with
/// `u = a − A[:, j]`.
pub fn rank1_inverse_update(ainv: &DenseMatrix, u: &[f64], j: usize) -> Result<DenseMatrix> {
    rank1_inverse_update_tol(ainv, u, j, DENOMINATOR_TOL)
}

/// [`rank1_inverse_update`] with a caller-chosen denominator tolerance.
pub fn rank1_inverse_update_tol(
    ainv: &DenseMatrix,
    u: &[f64],
    j: usize,
    tol: f64,
) -> Result<DenseMatrix> {
    let n = ainv.rows();
    if !ainv.is_square() || u.len() != n || j >= n {
        return Err(Error::DimensionMismatch(format!(
            "rank-one update of {}x{} inverse with |u| = {}, column {j}",
            ainv.rows(),
            ainv.cols(),
            u.len()
        )));
    }
    let mut out = ainv.clone();
    let mut scratch = Vec::new();
    rank1_inverse_update_in_place(&mut out, u, j, tol, &mut scratch)?;
    Ok(out)
}

/// In-place [`rank1_inverse_update_tol`] for square, shape-checked inputs.
/// `scratch` is reused across calls; `ainv` is untouched on error.
pub(crate) fn rank1_inverse_update_in_place(
    ainv: &mut DenseMatrix,
    u: &[f64],
    j: usize,
    tol: f64,
    scratch: &mut Vec<f64>,
) -> Result<()> {
    let n = ainv.rows();
    scratch.clear();
    scratch.resize(2 * n, 0.0);
    let (v, row_j) = scratch.split_at_mut(n);
    for (i, vi) in v.iter_mut().enumerate() {
        *vi = ainv.row(i).iter().zip(u).map(|(a, b)| a * b).sum();
    }
    let denom = 1.0 + v[j];
    if denom.abs() < tol {
        return Err(Error::DegenerateUpdate(denom));
    }
    row_j.copy_from_slice(ainv.row(j));
    for (i, vi) in v.iter().enumerate() {
        let f = vi / denom;
        if f == 0.0 {
            continue;
        }
        for (o, r) in ainv.row_mut(i).iter_mut().zip(row_j.iter()) {
            *o -= f * r;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::LuFactorization;
    use crate::oracle;

    fn max_rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        let scale = a.max_abs().max(b.max_abs()).max(1.0);
        a.sub(b).unwrap().max_abs() / scale
    }

    #[test]
    fn zero_update_is_identity() {
        let out = rank1_inverse_update(&DenseMatrix::identity(2), &[0.0, 0.0], 1).unwrap();
        assert_eq!(out, DenseMatrix::identity(2));
    }

    #[test]
    fn closed_form_two_by_two() {
        // I + (1,0)·e₂ᵀ = [[1,1],[0,1]] whose inverse is [[1,-1],[0,1]].
        let out = rank1_inverse_update(&DenseMatrix::identity(2), &[1.0, 0.0], 1).unwrap();
        assert_eq!(out.as_slice(), &[1.0, -1.0, 0.0, 1.0]);
    }

    #[test]
    fn matches_fresh_inverse() {
        let mut rng = oracle::rng(3);
        let a = oracle::well_conditioned(&mut rng, 4);
        let ainv = LuFactorization::factor(&a).unwrap().inverse();
        let u = oracle::gaussian_vec(&mut rng, 4);
        let updated = rank1_inverse_update(&ainv, &u, 2).unwrap();
        let mut a2 = a.clone();
        for i in 0..4 {
            a2[(i, 2)] += u[i];
        }
        let fresh = oracle::gauss_jordan_inverse(&a2).unwrap();
        assert!(max_rel_diff(&updated, &fresh) < 1e-8);
    }

    #[test]
    fn column_swap_walk_stays_accurate() {
        let mut rng = oracle::rng(5);
        let n = 6;
        let mut a = oracle::well_conditioned(&mut rng, n);
        let mut ainv = LuFactorization::factor(&a).unwrap().inverse();
        for step in 0..50 {
            let j = step % n;
            let new_col = oracle::well_conditioned(&mut rng, n).column(j);
            let u: Vec<f64> = (0..n).map(|i| new_col[i] - a[(i, j)]).collect();
            match rank1_inverse_update(&ainv, &u, j) {
                Ok(next) => {
                    ainv = next;
                    a.set_column(j, &new_col);
                }
                Err(Error::DegenerateUpdate(_)) => continue,
                Err(e) => panic!("{e}"),
            }
        }
        let fresh = oracle::gauss_jordan_inverse(&a).unwrap();
        assert!(max_rel_diff(&ainv, &fresh) < 1e-6);
    }

    #[test]
    fn degenerate_denominator_is_rejected() {
        // Replacing column 0 of I by e₂ makes the matrix singular.
        let err = rank1_inverse_update(&DenseMatrix::identity(2), &[-1.0, 1.0], 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateUpdate(_)));
    }
}

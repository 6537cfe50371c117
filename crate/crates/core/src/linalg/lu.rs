use super::{norm2, DenseMatrix, DenseVector};
use crate::error::{Error, Result};

/// Pivots smaller than `PIVOT_RTOL · ‖A‖_max` count as zero.
pub const PIVOT_RTOL: f64 = 1e-12;

/// Partial-pivot LU factorization `P·A = L·U` of a square matrix.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactorization {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let tolerance = PIVOT_RTOL * a.max_abs();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= tolerance || pivot == 0.0 {
                return Err(Error::SingularMatrix { pivot, tolerance });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| y[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim();
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            inv.set_column(j, &self.solve(&e));
        }
        inv
    }
}

/// Solves `A x = y` for square `A` by partial-pivot LU.
pub fn solve_square(a: &DenseMatrix, y: &[f64]) -> Result<DenseVector> {
    if a.rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} entries, matrix has {} rows",
            y.len(),
            a.rows()
        )));
    }
    let lu = LuFactorization::factor(a)?;
    Ok(DenseVector::from(lu.solve(y)))
}

/// Row-reduces `a` in place and returns the pivot column of each pivot row.
fn row_reduce(a: &mut DenseMatrix) -> Vec<usize> {
    let (m, k) = a.shape();
    let tolerance = PIVOT_RTOL * a.max_abs();
    let mut pivots = Vec::with_capacity(m);
    let mut row = 0;
    for col in 0..k {
        if row == m {
            break;
        }
        let (p, best) = (row..m)
            .map(|i| (i, a[(i, col)].abs()))
            .fold((row, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if best <= tolerance || best == 0.0 {
            continue;
        }
        if p != row {
            for j in 0..k {
                let tmp = a[(row, j)];
                a[(row, j)] = a[(p, j)];
                a[(p, j)] = tmp;
            }
        }
        let d = a[(row, col)];
        for j in col..k {
            a[(row, j)] /= d;
        }
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = a[(i, col)];
            if f != 0.0 {
                for j in col..k {
                    a[(i, j)] -= f * a[(row, j)];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Numerical rank via row reduction with the shared pivot tolerance.
pub fn rank(a: &DenseMatrix) -> usize {
    let mut work = a.clone();
    row_reduce(&mut work).len()
}

/// A nonzero kernel vector of `a` built from its first non-pivot column, scaled
/// so that `‖b‖_∞ = 1` with a positive first nonzero entry. `None` when `a` has
/// full column rank.
pub fn rref_kernel(a: &DenseMatrix) -> Option<Vec<f64>> {
    let k = a.cols();
    let mut work = a.clone();
    let pivots = row_reduce(&mut work);
    let free = (0..k).find(|c| !pivots.contains(c))?;
    let mut b = vec![0.0; k];
    b[free] = 1.0;
    for (r, &pc) in pivots.iter().enumerate() {
        b[pc] = -work[(r, free)];
    }
    let (peak, scale) = b
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best });
    let first = b.iter().copied().find(|v| *v != 0.0).unwrap_or(1.0);
    let s = first.signum() / scale;
    b.iter_mut().for_each(|v| *v *= s);
    // Division can leave the peak a rounding error short of one.
    b[peak] = b[peak].signum();
    debug_assert!(norm2(&b) > 0.0);
    Some(b)
}

//! Independent reference computations for tests only: Gauss–Jordan with full
//! pivoting, one-sided Jacobi SVD, and brute-force vertex enumeration. Nothing
//! here shares code with the production paths it is used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use satquant::linalg::DenseMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_0ac1e)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::new(rows, cols, gaussian_vec(rng, rows * cols)).unwrap()
}

/// Gaussian perturbation of `n·I`: condition number close to one.
pub fn well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let g = gaussian_matrix(rng, n, n);
    DenseMatrix::from_fn(n, n, |i, j| g[(i, j)] + if i == j { n as f64 } else { 0.0 })
}

/// Square solve by Gauss–Jordan elimination with full pivoting.
pub fn gauss_jordan_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(*bi);
            r
        })
        .collect();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |s, x| s.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let mut col_of: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut best = (k, k, 0.0);
        for i in k..n {
            for j in k..n {
                if m[i][j].abs() > best.2 {
                    best = (i, j, m[i][j].abs());
                }
            }
        }
        if best.2 <= 1e-11 * scale {
            return None;
        }
        m.swap(k, best.0);
        if best.1 != k {
            for row in m.iter_mut() {
                row.swap(k, best.1);
            }
            col_of.swap(k, best.1);
        }
        let p = m[k][k];
        for v in m[k].iter_mut() {
            *v /= p;
        }
        for i in 0..n {
            if i != k {
                let f = m[i][k];
                if f != 0.0 {
                    for j in k..=n {
                        let t = m[k][j];
                        m[i][j] -= f * t;
                    }
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in 0..n {
        x[col_of[k]] = m[k][n];
    }
    Some(x)
}

pub fn gauss_jordan_inverse(a: &DenseMatrix) -> Option<DenseMatrix> {
    let n = a.rows();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut out = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        out.set_column(j, &gauss_jordan_solve(&rows, &e)?);
    }
    Some(out)
}

/// Singular values (descending) by one-sided Jacobi rotations.
pub fn jacobi_singular_values(a: &DenseMatrix) -> Vec<f64> {
    // Work on columns of the taller orientation.
    let t = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    let (m, n) = t.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| t.column(j)).collect();
    for _sweep in 0..100 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = (0..m).map(|i| cols[p][i] * cols[q][i]).sum();
                if gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt().max(f64::MIN_POSITIVE));
                let zeta = (beta - alpha) / (2.0 * gamma);
                let tt = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let tt = if zeta == 0.0 { 1.0 } else { tt };
                let c = 1.0 / (1.0 + tt * tt).sqrt();
                let s = c * tt;
                for i in 0..m {
                    let xp = cols[p][i];
                    let xq = cols[q][i];
                    cols[p][i] = c * xp - s * xq;
                    cols[q][i] = s * xp + c * xq;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `min ‖z‖_∞ s.t. A z = y` by enumerating vertices of the polyhedron
/// `{(z, u) : A z = y, −u ≤ z_i ≤ u}` in `R^{n+1}`. Returns the optimal value.
pub fn linf_by_vertex_enumeration(a: &DenseMatrix, y: &[f64]) -> Option<(f64, Vec<f64>)> {
    let (m, n) = a.shape();
    let dim = n + 1;
    // Inequality rows over (z, u): z_i − u ≤ 0 and −z_i − u ≤ 0.
    let ineq: Vec<Vec<f64>> = (0..2 * n)
        .map(|r| {
            let mut row = vec![0.0; dim];
            let i = r / 2;
            row[i] = if r % 2 == 0 { 1.0 } else { -1.0 };
            row[n] = -1.0;
            row
        })
        .collect();
    let eq: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(0.0);
            row
        })
        .collect();
    let need = dim.checked_sub(m)?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for active in combinations(2 * n, need) {
        let mut sys = eq.clone();
        let mut rhs = y.to_vec();
        for &r in &active {
            sys.push(ineq[r].clone());
            rhs.push(0.0);
        }
        let Some(x) = gauss_jordan_solve(&sys, &rhs) else {
            continue;
        };
        let u = x[n];
        let feasible = (0..n).all(|i| x[i].abs() <= u + 1e-9 * (1.0 + u.abs()));
        if !feasible {
            continue;
        }
        if best.as_ref().is_none_or(|(bu, _)| u < *bu) {
            best = Some((u, x[..n].to_vec()));
        }
    }
    best
}

/// `min cᵀx s.t. A x = b, x ≥ 0` by enumerating every basis (full row rank `A`).
pub fn standard_form_by_basis_enumeration(a: &DenseMatrix, b: &[f64], c: &[f64]) -> Option<f64> {
    let (m, n) = a.shape();
    let mut best: Option<f64> = None;
    for basis in combinations(n, m) {
        let sys: Vec<Vec<f64>> = (0..m).map(|i| basis.iter().map(|&j| a[(i, j)]).collect()).collect();
        let Some(xb) = gauss_jordan_solve(&sys, b) else {
            continue;
        };
        if xb.iter().any(|v| *v < -1e-9) {
            continue;
        }
        let obj: f64 = basis.iter().zip(&xb).map(|(&j, v)| c[j] * v).sum();
        if best.is_none_or(|bv| obj < bv) {
            best = Some(obj);
        }
    }
    best
}

/// `min cᵀz s.t. A z = y, |z_i| ≤ cap` by vertex enumeration over the box.
pub fn box_lp_by_vertex_enumeration(
    a: &DenseMatrix,
    y: &[f64],
    cost: &[f64],
    cap: f64,
) -> Option<f64> {
    let (m, n) = a.shape();
    let eq: Vec<Vec<f64>> = (0..m).map(|i| a.row(i).to_vec()).collect();
    let mut best: Option<f64> = None;
    // A vertex fixes n − m coordinates at ±cap and solves for the rest.
    for fixed in combinations(n, n - m) {
        let free: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
        for signs in 0..(1u64 << fixed.len()) {
            let mut z = vec![0.0; n];
            for (k, &i) in fixed.iter().enumerate() {
                z[i] = if signs >> k & 1 == 1 { cap } else { -cap };
            }
            let rhs: Vec<f64> = (0..m)
                .map(|r| y[r] - fixed.iter().map(|&i| a[(r, i)] * z[i]).sum::<f64>())
                .collect();
            let sys: Vec<Vec<f64>> = eq.iter().map(|row| free.iter().map(|&j| row[j]).collect()).collect();
            let Some(zf) = gauss_jordan_solve(&sys, &rhs) else {
                continue;
            };
            if zf.iter().any(|v| v.abs() > cap * (1.0 + 1e-9)) {
                continue;
            }
            for (k, &i) in free.iter().enumerate() {
                z[i] = zf[k];
            }
            let obj: f64 = cost.iter().zip(&z).map(|(c, v)| c * v).sum();
            if best.is_none_or(|bv| obj < bv) {
                best = Some(obj);
            }
        }
    }
    best
}

/// Largest spectral norm over all `m`-column restrictions, via Jacobi SVD.
pub fn gamma_by_jacobi(xt: &DenseMatrix) -> f64 {
    let (m, n) = xt.shape();
    let k = m.min(n);
    combinations(n, k)
        .into_iter()
        .map(|t| jacobi_singular_values(&xt.select_columns(&t))[0])
        .fold(0.0, f64::max)
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot, norm2, DenseMatrix};

/// Largest singular value of `a` by power iteration on the smaller Gram matrix.
///
/// The start vector is drawn from a ChaCha stream seeded with `seed`, so the
/// estimate is a deterministic function of its inputs. Iteration stops early
/// once the Rayleigh quotient is stationary to machine precision.
pub fn spectral_norm_estimate(a: &DenseMatrix, iterations: usize, seed: u64) -> f64 {
    let iterations = iterations.max(1);
    if a.max_abs() == 0.0 || a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let gram = gram_of_smaller_side(a);
    let n = gram.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.5).collect();
    normalize(&mut v);

    let mut lambda = 0.0_f64;
    for _ in 0..iterations {
        let mut next = gram.matvec(&v);
        let rayleigh = dot(&v, &next);
        let nrm = norm2(&next);
        if nrm == 0.0 {
            break;
        }
        next.iter_mut().for_each(|x| *x /= nrm);
        v = next;
        let converged = (rayleigh - lambda).abs() <= 1e-15 * rayleigh.abs();
        lambda = rayleigh;
        if converged {
            break;
        }
    }
    // Final Rayleigh quotient of the converged vector.
    let gv = gram.matvec(&v);
    lambda = lambda.max(dot(&v, &gv));
    lambda.max(0.0).sqrt()
}

fn gram_of_smaller_side(a: &DenseMatrix) -> DenseMatrix {
    let (r, c) = a.shape();
    if r <= c {
        // A·Aᵀ
        let mut g = DenseMatrix::zeros(r, r);
        for i in 0..r {
            for j in i..r {
                let v = dot(a.row(i), a.row(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    } else {
        let t = a.transpose();
        gram_of_smaller_side(&t)
    }
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn zero_and_diagonal() {
        assert_eq!(spectral_norm_estimate(&DenseMatrix::zeros(3, 3), 10, 0), 0.0);
        let d = DenseMatrix::from_rows(&[[3.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((spectral_norm_estimate(&d, 200, 1) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn agrees_with_jacobi_svd() {
        let mut rng = oracle::rng(21);
        for _ in 0..10 {
            let a = oracle::gaussian_matrix(&mut rng, 5, 5);
            let exact = oracle::jacobi_singular_values(&a)[0];
            let est = spectral_norm_estimate(&a, 2000, 9);
            assert!(est <= exact * (1.0 + 1e-12));
            assert!((est - exact).abs() <= 1e-6 * exact, "{est} vs {exact}");
        }
    }

    #[test]
    fn rectangular_both_orientations() {
        let mut rng = oracle::rng(22);
        let a = oracle::gaussian_matrix(&mut rng, 3, 11);
        let exact = oracle::jacobi_singular_values(&a)[0];
        let wide = spectral_norm_estimate(&a, 2000, 0);
        let tall = spectral_norm_estimate(&a.transpose(), 2000, 0);
        assert!((wide - exact).abs() <= 1e-9 * exact);
        assert!((tall - exact).abs() <= 1e-9 * exact);
    }

    #[test]
    fn monotone_under_appending_columns() {
        let mut rng = oracle::rng(23);
        for _ in 0..20 {
            let a = oracle::gaussian_matrix(&mut rng, 4, 6);
            let col = oracle::gaussian_vec(&mut rng, 4);
            let mut cols: Vec<Vec<f64>> = (0..6).map(|j| a.column(j)).collect();
            cols.push(col);
            let wider = DenseMatrix::from_columns(&cols).unwrap();
            let s0 = spectral_norm_estimate(&a, 1000, 4);
            let s1 = spectral_norm_estimate(&wider, 1000, 4);
            assert!(s1 >= s0 - 1e-8);
        }
    }
}

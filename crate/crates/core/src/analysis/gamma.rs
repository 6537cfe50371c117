use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm_estimate, DenseMatrix};
use crate::seeding;

/// Largest number of `m`-subsets [`gamma_exact`] will enumerate.
pub const EXACT_GUARD: u128 = 200_000;

/// Power-iteration budget for one restriction (stops early on convergence).
const POWER_ITERATIONS: usize = 2_000;

/// Fixed start-vector seed so equal restrictions always get equal estimates.
const SUBSET_SEED: u64 = 0x6a4d_a7a5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub exact: Option<f64>,
    pub upper: f64,
    pub monte_carlo_lower: f64,
    pub samples: usize,
}

impl GammaEstimate {
    /// The tightest available value that is still an upper bound.
    pub fn best_upper(&self) -> f64 {
        self.exact.unwrap_or(self.upper)
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn restriction_norm(xt: &DenseMatrix, cols: &[usize]) -> f64 {
    spectral_norm_estimate(&xt.select_columns(cols), POWER_ITERATIONS, SUBSET_SEED)
}

/// Number of columns in each restriction: `m`, or all of them when `N₀ ≤ m`.
fn subset_size(xt: &DenseMatrix) -> usize {
    xt.rows().min(xt.cols())
}

/// `max_{|T| = m} ‖Xᵀ|_T‖` by exhaustive enumeration.
pub fn gamma_exact(xt: &DenseMatrix) -> Result<f64> {
    gamma_exact_with_guard(xt, EXACT_GUARD)
}

pub fn gamma_exact_with_guard(xt: &DenseMatrix, guard: u128) -> Result<f64> {
    let n = xt.cols();
    let k = subset_size(xt);
    let count = binomial(n, k);
    if count > guard {
        return Err(Error::TooLarge(count));
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = 0.0_f64;
    loop {
        best = best.max(restriction_norm(xt, &idx));
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(best);
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Full-matrix upper bound, sampled lower bound, and the exact value when at
/// most `exact_limit` subsets exist.
pub fn gamma_bounds_with_limit(
    xt: &DenseMatrix,
    samples: usize,
    seed: u64,
    exact_limit: u128,
) -> GammaEstimate {
    let samples = samples.max(1);
    let n = xt.cols();
    let k = subset_size(xt);
    let exact = gamma_exact_with_guard(xt, exact_limit.min(EXACT_GUARD)).ok();
    let mut rng = seeding::stream(seed, &[0x6a]);
    let mut lower = 0.0_f64;
    for _ in 0..samples {
        let mut cols = sample(&mut rng, n, k).into_vec();
        cols.sort_unstable();
        lower = lower.max(restriction_norm(xt, &cols));
    }
    let mut upper = spectral_norm_estimate(xt, POWER_ITERATIONS, SUBSET_SEED);
    // The full norm dominates every restriction; keep the estimates ordered
    // even where power iteration stops a rounding error short.
    upper = upper.max(lower);
    if let Some(e) = exact {
        upper = upper.max(e);
    }
    GammaEstimate {
        exact,
        upper,
        monte_carlo_lower: lower,
        samples,
    }
}

/// Default exact-enumeration budget for [`gamma_bounds`].
pub const AUTO_EXACT_LIMIT: u128 = 5_000;

pub fn gamma_bounds(xt: &DenseMatrix, samples: usize, seed: u64) -> GammaEstimate {
    gamma_bounds_with_limit(xt, samples, seed, AUTO_EXACT_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn singleton_restrictions() {
        let xt = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0]]).unwrap();
        assert!((gamma_exact(&xt).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn square_is_full_norm() {
        let mut rng = oracle::rng(61);
        let xt = oracle::well_conditioned(&mut rng, 4);
        let exact = oracle::jacobi_singular_values(&xt)[0];
        assert!((gamma_exact(&xt).unwrap() - exact).abs() <= 1e-9 * exact);
    }

    #[test]
    fn sandwich_and_oracle() {
        let mut rng = oracle::rng(62);
        for s in 0..10 {
            let xt = oracle::gaussian_matrix(&mut rng, 2, 6);
            let g = gamma_bounds(&xt, 20, s);
            let exact = g.exact.unwrap();
            assert!(g.monte_carlo_lower <= exact && exact <= g.upper);
            assert!((exact - oracle::gamma_by_jacobi(&xt)).abs() <= 1e-9 * exact);
        }
    }

    #[test]
    fn guard_trips() {
        let xt = DenseMatrix::zeros(8, 512);
        assert!(matches!(gamma_exact(&xt), Err(Error::TooLarge(_))));
        assert_eq!(binomial(6, 2), 15);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn orthonormal_rows() {
        let xt = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]).unwrap();
        let g = gamma_bounds(&xt, 5, 0);
        assert!((g.upper - 1.0).abs() < 1e-12);
    }
}

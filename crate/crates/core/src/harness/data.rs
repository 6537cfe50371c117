use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::seeding;

const DATA_STREAM: u64 = 0xda7a;
const WEIGHT_STREAM: u64 = 0x3e16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Gaussian,
    FrameConcat,
    File,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Gaussian => "gaussian",
            Distribution::FrameConcat => "frame_concat",
            Distribution::File => "file",
        })
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Distribution::Gaussian),
            "frame_concat" => Ok(Distribution::FrameConcat),
            "file" => Ok(Distribution::File),
            other => Err(Error::InvalidParameter(format!("unknown distribution `{other}`"))),
        }
    }
}

/// Data matrix `Xᵀ` (`m × N₀`) for the given seed.
///
/// `gaussian` draws i.i.d. standard normal entries; `frame_concat` places
/// `N₀/m` random orthonormal bases side by side, so `‖Xᵀ‖ = √(N₀/m)`.
pub fn gen_data(distribution: Distribution, m: usize, n0: usize, seed: u64) -> Result<DenseMatrix> {
    if m == 0 || n0 == 0 {
        return Err(Error::InvalidDims(format!("m = {m} and N0 = {n0} must be positive")));
    }
    let mut rng = seeding::stream(seed, &[DATA_STREAM]);
    match distribution {
        Distribution::Gaussian => {
            let data = (0..m * n0).map(|_| StandardNormal.sample(&mut rng)).collect();
            DenseMatrix::new(m, n0, data)
        }
        Distribution::FrameConcat => {
            if n0 % m != 0 {
                return Err(Error::InvalidDims(format!("frame_concat needs m | N0, got m = {m}, N0 = {n0}")));
            }
            let mut out = DenseMatrix::zeros(m, n0);
            for block in 0..n0 / m {
                let basis = random_orthonormal(&mut rng, m);
                for (k, col) in basis.iter().enumerate() {
                    out.set_column(block * m + k, col);
                }
            }
            Ok(out)
        }
        Distribution::File => Err(Error::InvalidParameter(
            "file data is read from disk, not generated".into(),
        )),
    }
}

/// Columns of the Q factor of a Gaussian matrix, by modified Gram–Schmidt
/// with one re-orthogonalization pass.
fn random_orthonormal<R: Rng>(rng: &mut R, m: usize) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    while cols.len() < m {
        let mut v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        for _pass in 0..2 {
            for q in &cols {
                let p = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= p * b);
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|a| *a /= n);
            cols.push(v);
        }
    }
    cols
}

/// Weight matrix `N₀ × N₁` with i.i.d. entries uniform on `[−1, 1]`.
pub fn gen_weights(n0: usize, n1: usize, seed: u64) -> DenseMatrix {
    let mut rng = seeding::stream(seed, &[WEIGHT_STREAM]);
    DenseMatrix::from_fn(n0, n1, |_, _| rng.random_range(-1.0..=1.0))
}

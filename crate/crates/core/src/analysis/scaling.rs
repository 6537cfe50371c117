use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingAxis {
    /// Error against bit budget: `log₂ y` on `B`, so the slope is bits of
    /// error gained per extra bit (−1 for a clean `2^{−B}` rate).
    Bits,
    N0,
    M,
    RuntimeN,
    RuntimeM,
}

impl ScalingAxis {
    fn semi_log(self) -> bool {
        matches!(self, ScalingAxis::Bits)
    }
}

impl fmt::Display for ScalingAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalingAxis::Bits => "bits",
            ScalingAxis::N0 => "n0",
            ScalingAxis::M => "m",
            ScalingAxis::RuntimeN => "runtime_n",
            ScalingAxis::RuntimeM => "runtime_m",
        })
    }
}

impl FromStr for ScalingAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "b" | "bits" => Ok(ScalingAxis::Bits),
            "n0" => Ok(ScalingAxis::N0),
            "m" => Ok(ScalingAxis::M),
            "runtime_n" => Ok(ScalingAxis::RuntimeN),
            "runtime_m" => Ok(ScalingAxis::RuntimeM),
            other => Err(Error::InvalidParameter(format!("unknown scaling axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub axis: ScalingAxis,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares line through `(log x, log y)` (or `(x, log₂ y)` on the bits
/// axis).
pub fn fit_scaling(x: &[f64], y: &[f64], axis: ScalingAxis) -> Result<ScalingFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} abscissae, {} ordinates",
            x.len(),
            y.len()
        )));
    }
    if x.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_POINTS,
            got: x.len(),
        });
    }
    let semi = axis.semi_log();
    let mut u = Vec::with_capacity(x.len());
    let mut v = Vec::with_capacity(y.len());
    for (&xi, &yi) in x.iter().zip(y) {
        if !(yi > 0.0) || !(semi || xi > 0.0) || !xi.is_finite() || !yi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scaling fit needs positive finite data, got ({xi}, {yi})"
            )));
        }
        if semi {
            u.push(xi);
            v.push(yi.log2());
        } else {
            u.push(xi.ln());
            v.push(yi.ln());
        }
    }
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let sxx: f64 = u.iter().map(|a| (a - mu) * (a - mu)).sum();
    let sxy: f64 = u.iter().zip(&v).map(|(a, b)| (a - mu) * (b - mv)).sum();
    let syy: f64 = v.iter().map(|b| (b - mv) * (b - mv)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mv - slope * mu;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(ScalingFit {
        axis,
        slope,
        intercept,
        r_squared,
        points: u.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_slopes() {
        let n = [512.0, 1024.0, 2048.0, 4096.0, 8192.0];
        let fit = fit_scaling(&n, &n, ScalingAxis::RuntimeN).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let m = [8.0, 16.0, 32.0, 64.0];
        let t: Vec<f64> = m.iter().map(|v| v * v * 4096.0).collect();
        let fit = fit_scaling(&m, &t, ScalingAxis::RuntimeM).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);

        let b = [1.0, 2.0, 3.0, 4.0];
        let e: Vec<f64> = b.iter().map(|v: &f64| 2f64.powf(-v)).collect();
        let fit = fit_scaling(&b, &e, ScalingAxis::Bits).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let e = fit_scaling(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], ScalingAxis::N0).unwrap_err();
        assert_eq!(e, Error::InsufficientData { needed: 4, got: 3 });
        assert!(fit_scaling(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 3.0, 4.0], ScalingAxis::N0).is_err());
    }
}

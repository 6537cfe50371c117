use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::csv_io::{format_matrix_csv, parse_matrix_csv};
use super::data::{gen_data, Distribution};
use crate::analysis::{evaluate_bounds, gamma_bounds, gamma_exact};
use crate::linalg::DenseMatrix;
use crate::linf::{layer_linf_preprocess, linf_minimize};
use crate::pipeline::{quantize_layer, quantize_neuron, Method};
use crate::preprocess::{preprocess_accelerated, preprocess_baseline, verify_preprocess_contract};
use crate::quantizer::{build_uniform_bbit, msq, worst_case_distortion};
use crate::seeding;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: usize,
    pub total: usize,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::ok)
    }
}

fn tally(name: &str, results: impl IntoIterator<Item = bool>) -> CheckOutcome {
    let (mut passed, mut total) = (0, 0);
    for r in results {
        total += 1;
        passed += usize::from(r);
    }
    CheckOutcome {
        name: name.to_string(),
        passed,
        total,
    }
}

fn uniform_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

fn quantizer_checks() -> CheckOutcome {
    let mut results = Vec::new();
    for bits in 1..=8u32 {
        let c = 0.75;
        let a = build_uniform_bbit(bits, c).expect("valid alphabet");
        let elems = a.elements();
        results.push(elems.iter().all(|&p| msq(p, &a) == p));
        results.push(msq(c, &a) == c && msq(-c, &a) == -c && msq(2.0 * c, &a) == c);
        let grid: Vec<f64> = (0..=400).map(|k| -c + 2.0 * c * k as f64 / 400.0).collect();
        results.push(grid.windows(2).all(|p| msq(p[0], &a) <= msq(p[1], &a)));
        // Zero is the exact midpoint of the two innermost elements.
        results.push(msq(0.0, &a) == elems[elems.len() / 2]);
        let d = worst_case_distortion(&a).worst_case;
        let exact = c / (2f64.powi(bits as i32) - 1.0);
        results.push((d - exact).abs() <= 1e-15 * c);
    }
    tally("quantizer", results)
}

fn walk_checks(rng: &mut ChaCha8Rng, seed: u64) -> CheckOutcome {
    let mut results = Vec::new();
    for (t, &(m, n)) in [(2usize, 16usize), (4, 40), (8, 64)].iter().cycle().take(24).enumerate() {
        let xt = gen_data(Distribution::Gaussian, m, n, seeding::derive_seed(seed, &[1, t as u64]))
            .expect("valid dims");
        let w = uniform_weights(rng, n);
        let c = w.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        for r in [preprocess_baseline(&xt, &w, c), preprocess_accelerated(&xt, &w, c)] {
            results.push(r.is_ok_and(|r| verify_preprocess_contract(&xt, &w, &r, c, m).all_passed()));
        }
    }
    tally("preprocess contract", results)
}

fn bound_checks(rng: &mut ChaCha8Rng, seed: u64) -> CheckOutcome {
    let mut results = Vec::new();
    for t in 0..20u64 {
        let (m, n) = if t % 2 == 0 { (3, 24) } else { (4, 32) };
        let xt = gen_data(Distribution::Gaussian, m, n, seeding::derive_seed(seed, &[2, t])).expect("valid dims");
        let w = uniform_weights(rng, n);
        let bits = 1 + (t % 4) as u32;
        let ok = quantize_neuron(&xt, &w, bits, Method::Accelerated).and_then(|(q, _)| {
            let wm = DenseMatrix::from_columns(&[&w])?;
            let qm = DenseMatrix::from_columns(&[q.as_slice()])?;
            let c = w.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            evaluate_bounds(&xt, &wm, &qm, &build_uniform_bbit(bits, c)?)
        });
        results.push(ok.is_ok_and(|r| r.within_bound()));
    }
    tally("deterministic bound", results)
}

fn layer_checks(rng: &mut ChaCha8Rng, seed: u64) -> CheckOutcome {
    let mut results = Vec::new();
    for t in 0..6u64 {
        let xt = gen_data(Distribution::Gaussian, 3, 30, seeding::derive_seed(seed, &[3, t])).expect("valid dims");
        let w = DenseMatrix::new(30, 3, uniform_weights(rng, 90)).expect("shape");
        for method in Method::ALL {
            let ok = quantize_layer(&xt, &w, 2, method)
                .and_then(|r| evaluate_bounds(&xt, &w, &r.q, &r.alphabet));
            results.push(ok.is_ok_and(|r| r.within_bound()));
        }
    }
    tally("layer bound", results)
}

fn linf_checks(rng: &mut ChaCha8Rng, seed: u64) -> CheckOutcome {
    let mut results = Vec::new();
    for t in 0..10u64 {
        let (m, n) = (3, 12);
        let xt = gen_data(Distribution::Gaussian, m, n, seeding::derive_seed(seed, &[4, t])).expect("valid dims");
        let w = uniform_weights(rng, n);
        let wmax = w.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        results.push(
            linf_minimize(&xt, &w).is_ok_and(|s| s.saturated_count > n - m && s.value <= wmax * (1.0 + 1e-12)),
        );
        let wm = DenseMatrix::new(n, 2, uniform_weights(rng, 2 * n)).expect("shape");
        results.push(layer_linf_preprocess(&xt, &wm, seed ^ t).is_ok_and(|r| {
            r.stage2.iter().all(|s| s.saturated_count >= n - m && s.value == r.c_hat)
        }));
    }
    tally("linf saturation", results)
}

fn gamma_checks(seed: u64) -> CheckOutcome {
    let mut results = Vec::new();
    for t in 0..5u64 {
        let xt = gen_data(Distribution::Gaussian, 2, 7, seeding::derive_seed(seed, &[5, t])).expect("valid dims");
        let g = gamma_bounds(&xt, 16, t);
        let ok = gamma_exact(&xt).is_ok_and(|e| {
            g.monte_carlo_lower <= e * (1.0 + 1e-9) && e <= g.upper * (1.0 + 1e-9)
        });
        results.push(ok);
    }
    tally("gamma sandwich", results)
}

fn csv_checks(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let results = (0..5).map(|_| {
        let m = DenseMatrix::from_fn(3, 4, |_, _| rng.random_range(-1e6..1e6) * rng.random::<f64>());
        parse_matrix_csv(&format_matrix_csv(&m)).is_ok_and(|b| b == m)
    });
    tally("csv round trip", results.collect::<Vec<_>>())
}

/// Runs the full invariant suite at small scale.
pub fn run_checks(seed: u64) -> CheckReport {
    let mut rng = seeding::stream(seed, &[0xc4ec]);
    let checks = vec![
        quantizer_checks(),
        walk_checks(&mut rng, seed),
        bound_checks(&mut rng, seed),
        layer_checks(&mut rng, seed),
        linf_checks(&mut rng, seed),
        gamma_checks(seed),
        csv_checks(&mut rng),
    ];
    CheckReport { seed, checks }
}

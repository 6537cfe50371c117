//! Command-line front end: pre-process or quantize neurons and layers stored
//! as CSV, run experiment sweeps, estimate Γ, and run the invariant suite.
//!
//! Exit status: 0 on success, 1 when a contract or bound is violated, 2 on
//! usage or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use satquant::analysis::{evaluate_bounds_with, gamma_bounds_with_limit, EXACT_GUARD};
use satquant::harness::{read_matrix_csv, run_checks, run_sweep, write_matrix_csv, ExperimentConfig};
use satquant::pipeline::{
    quantize_layer_with, quantize_network_with, Activation, LayerOptions, NetworkLayer,
    NetworkSpec, Propagation,
};
use satquant::preprocess::{
    preprocess_accelerated, preprocess_baseline, verify_preprocess_contract, PreprocessResult,
};
use satquant::{DenseMatrix, Error, Method};

#[derive(Parser)]
#[command(name = "satquant", version, about = "Saturating pre-processing and scalar quantization of network layers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed for every random draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pre-processing method: baseline, accelerated or linf.
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    /// Bits per weight.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=52))]
    bits: Option<u32>,
    /// Output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Pre-process one neuron and print its contract report.
    Preprocess {
        /// Data matrix Xᵀ (m × N₀) as CSV.
        #[arg(long)]
        data: PathBuf,
        /// Weights (N₀ × N₁) as CSV.
        #[arg(long)]
        weights: PathBuf,
        /// Column of the weight file to use.
        #[arg(long, default_value_t = 0)]
        column: usize,
        /// Saturation level; defaults to the largest weight magnitude.
        #[arg(long)]
        cap: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Quantize a layer, or a network when several weight files are given.
    Quantize {
        #[arg(long)]
        data: PathBuf,
        /// One weight file per layer, in order.
        #[arg(long, required = true, num_args = 1..)]
        weights: Vec<PathBuf>,
        /// Activation after each layer except the last (identity).
        #[arg(long, default_value = "relu")]
        activation: String,
        /// Quantize deeper layers against `analytic` or `propagated` inputs.
        #[arg(long, default_value = "propagated")]
        propagation: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment sweep from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for the cells.
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate Γ for a data file.
    Gamma {
        #[arg(long)]
        data: PathBuf,
        /// Random subsets for the lower estimate.
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Enumerate exactly when at most this many subsets exist.
        #[arg(long, default_value_t = EXACT_GUARD as u64)]
        exact_limit: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite and print pass counts.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

enum Failure {
    Violation(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundViolated { .. } => Failure::Violation(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<DenseMatrix, Failure> {
    read_matrix_csv(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("json value serializes");
    match out {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_preprocess(data: &Path, weights: &Path, column: usize, cap: Option<f64>, common: &Common) -> Outcome {
    let xt = read(data)?;
    let w = read(weights)?;
    if column >= w.cols() {
        return Err(Failure::Usage(format!("column {column} out of range, weights have {}", w.cols())));
    }
    let wj = w.column(column);
    let method = common.method.unwrap_or(Method::Accelerated);
    let (result, c): (PreprocessResult, f64) = match method {
        Method::Linf => {
            if cap.is_some() {
                return Err(Failure::Usage("--cap does not apply to linf".into()));
            }
            let wm = DenseMatrix::from_columns(&[&wj])?;
            let r = satquant::linf::layer_linf_preprocess(&xt, &wm, common.seed)?;
            let w_hat = r.w_hat.column(0);
            let saturated = (0..w_hat.len()).filter(|&i| w_hat[i].abs() == r.c_hat).collect();
            let res = PreprocessResult {
                data_residual: satquant::preprocess::data_residual(&xt, &wj, &w_hat),
                w_hat: w_hat.into(),
                saturated,
                iterations: r.stage1[0].iterations + r.stage2[0].iterations,
                method,
                cap: r.c_hat,
                fell_back: false,
            };
            (res, r.c_hat)
        }
        _ => {
            let c = cap.unwrap_or_else(|| satquant::pipeline::neuron_cap(&wj));
            let r = if method == Method::Baseline {
                preprocess_baseline(&xt, &wj, c)?
            } else {
                preprocess_accelerated(&xt, &wj, c)?
            };
            (r, c)
        }
    };
    let report = verify_preprocess_contract(&xt, &wj, &result, c, xt.rows());
    if let Some(out) = &common.out {
        let col = DenseMatrix::from_columns(&[result.w_hat.as_slice()])?;
        write_matrix_csv(out, &col)?;
    }
    let value = serde_json::json!({
        "method": method,
        "cap": c,
        "iterations": result.iterations,
        "saturated": result.saturated.len(),
        "fell_back": result.fell_back,
        "contract": report,
        "passed": report.all_passed(),
    });
    emit(&value, None)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Violation("pre-processing contract violated".into()))
    }
}

fn cmd_quantize(data: &Path, weights: &[PathBuf], activation: &str, propagation: &str, common: &Common) -> Outcome {
    let bits = common.bits.ok_or_else(|| Failure::Usage("--bits is required".into()))?;
    let method = common.method.unwrap_or(Method::Accelerated);
    let xt = read(data)?;
    let opts = LayerOptions {
        seed: common.seed,
        ..LayerOptions::default()
    };
    if weights.len() == 1 {
        let w = read(&weights[0])?;
        let r = quantize_layer_with(&xt, &w, bits, method, &opts)?;
        let gamma = satquant::analysis::gamma_bounds(&xt, 64, common.seed);
        let report = evaluate_bounds_with(&xt, &w, &r.q, &r.alphabet, &gamma, common.seed)?;
        if let Some(out) = &common.out {
            write_matrix_csv(out, &r.q)?;
        }
        return emit(&serde_json::json!({ "method": method, "cap": r.c_shared, "report": report }), None);
    }
    let act: Activation = activation.parse()?;
    let propagation: Propagation = propagation.parse()?;
    let mut layers = Vec::with_capacity(weights.len());
    for (l, p) in weights.iter().enumerate() {
        layers.push(NetworkLayer {
            weights: read(p)?,
            activation: if l + 1 < weights.len() { act } else { Activation::Identity },
        });
    }
    let net = NetworkSpec::new(layers)?;
    let nq = quantize_network_with(&net, &xt, bits, method, propagation, &opts)?;
    let qnet = nq.quantized_network(&net)?;
    let rel = satquant::pipeline::network_relative_error(&net, &qnet, &xt)?;
    if let Some(out) = &common.out {
        for (l, layer) in nq.layers.iter().enumerate() {
            let stem = out.with_extension("");
            let path = PathBuf::from(format!("{}_layer{l}.csv", stem.display()));
            write_matrix_csv(path, &layer.q)?;
        }
    }
    let value = serde_json::json!({
        "method": method,
        "relative_error": rel,
        "layer_errors": nq.layers.iter().map(|l| l.frobenius_error()).collect::<Vec<_>>(),
        "warnings": nq.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
    });
    emit(&value, None)
}

fn cmd_sweep(config: &Path, workers: Option<usize>, common: &Common, seed_given: bool) -> Outcome {
    let mut cfg = ExperimentConfig::load(config)?;
    if seed_given {
        cfg.master_seed = common.seed;
    }
    if let Some(m) = common.method {
        cfg.methods = vec![m];
    }
    if let Some(b) = common.bits {
        cfg.bits = vec![b];
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    if workers.is_some() {
        cfg.workers = workers;
    }
    let report = run_sweep(&cfg)?;
    if cfg.out.is_none() {
        print!("{}", report.to_csv_string());
    }
    eprintln!(
        "{} rows, {} failed, {} violations",
        report.rows.len(),
        report.failures(),
        report.violations()
    );
    if report.violations() > 0 {
        return Err(Failure::Violation(format!("{} rows violate a contract or bound", report.violations())));
    }
    Ok(())
}

fn cmd_gamma(data: &Path, samples: usize, exact_limit: u64, common: &Common) -> Outcome {
    let xt = read(data)?;
    let g = gamma_bounds_with_limit(&xt, samples, common.seed, exact_limit as u128);
    emit(&serde_json::to_value(&g).expect("estimate serializes"), common.out.as_deref())
}

fn cmd_check(common: &Common) -> Outcome {
    let report = run_checks(common.seed);
    for c in &report.checks {
        println!("{:<22} {}/{}", c.name, c.passed, c.total);
    }
    if let Some(out) = &common.out {
        emit(&serde_json::to_value(&report).expect("report serializes"), Some(out))?;
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Violation("invariant suite failed".into()))
    }
}

fn main() -> ExitCode {
    let seed_given = std::env::args().any(|a| a == "--seed" || a.starts_with("--seed="));
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Preprocess { data, weights, column, cap, common } => {
            cmd_preprocess(data, weights, *column, *cap, common)
        }
        Command::Quantize { data, weights, activation, propagation, common } => {
            cmd_quantize(data, weights, activation, propagation, common)
        }
        Command::Sweep { config, workers, common } => cmd_sweep(config, *workers, common, seed_given),
        Command::Gamma { data, samples, exact_limit, common } => cmd_gamma(data, *samples, *exact_limit, common),
        Command::Check { common } => cmd_check(common),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("satquant: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("satquant: {msg}");
            eprintln!("usage: satquant <preprocess|quantize|sweep|gamma|check> [--seed N] [--method M] [--bits B] [--out PATH]");
            ExitCode::from(2)
        }
    }
}

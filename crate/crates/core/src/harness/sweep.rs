use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use super::csv_io::read_matrix_csv;
use super::data::{gen_data, gen_weights, Distribution};
use crate::analysis::{evaluate_bounds_with, gamma_bounds, GammaEstimate};
use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseMatrix};
use crate::linf::layer_linf_preprocess_with;
use crate::par::{map_indexed, with_workers, Execution};
use crate::pipeline::{
    quantize_layer_with, quantize_network_with, Activation, LayerOptions, LayerQuantizationResult,
    Method, NetworkLayer, NetworkSpec, Propagation,
};
use crate::preprocess::{
    preprocess_accelerated, preprocess_baseline, verify_preprocess_contract, PreprocessResult,
};
use crate::quantizer::build_uniform_bbit;
use crate::seeding::derive_seed;

pub const CSV_HEADER: [&str; 18] = [
    "kind", "method", "B", "m", "N0", "N1", "seed", "abs_err", "rel_err", "bound_det",
    "bound_gauss", "sat_count", "iters", "ms", "gamma_exact", "gamma_lower", "gamma_upper",
    "error",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: ExperimentKind,
    pub method: Option<Method>,
    #[serde(rename = "B")]
    pub bits: Option<u32>,
    pub m: usize,
    #[serde(rename = "N0")]
    pub n0: usize,
    #[serde(rename = "N1")]
    pub n1: usize,
    pub seed: u64,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub bound_det: Option<f64>,
    pub bound_gauss: Option<f64>,
    pub sat_count: Option<usize>,
    pub iters: Option<usize>,
    /// Median wall-clock milliseconds; 0 when timing is off.
    pub ms: f64,
    pub gamma_exact: Option<f64>,
    pub gamma_lower: Option<f64>,
    pub gamma_upper: Option<f64>,
    pub error: Option<String>,
    /// The cell broke a pre-processing contract or the deterministic bound.
    pub violation: bool,
}

impl SweepRow {
    fn blank(kind: ExperimentKind, method: Option<Method>, bits: Option<u32>, dims: (usize, usize, usize), seed: u64) -> Self {
        Self {
            kind,
            method,
            bits,
            m: dims.0,
            n0: dims.1,
            n1: dims.2,
            seed,
            abs_err: None,
            rel_err: None,
            bound_det: None,
            bound_gauss: None,
            sat_count: None,
            iters: None,
            ms: 0.0,
            gamma_exact: None,
            gamma_lower: None,
            gamma_upper: None,
            error: None,
            violation: false,
        }
    }

    fn failed(mut self, e: &Error) -> Self {
        self.violation = matches!(e, Error::BoundViolated { .. });
        self.error = Some(e.to_string());
        self
    }

    pub fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        let optu = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.kind.to_string(),
            self.method.map(|m| m.to_string()).unwrap_or_default(),
            self.bits.map(|b| b.to_string()).unwrap_or_default(),
            self.m.to_string(),
            self.n0.to_string(),
            self.n1.to_string(),
            self.seed.to_string(),
            opt(self.abs_err),
            opt(self.rel_err),
            opt(self.bound_det),
            opt(self.bound_gauss),
            optu(self.sat_count),
            optu(self.iters),
            fmt_float(self.ms),
            opt(self.gamma_exact),
            opt(self.gamma_lower),
            opt(self.gamma_upper),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Shortest round-trip decimal, in exponent form outside `[1e−5, 1e15)`.
fn fmt_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    pub version: String,
    pub master_seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violation).count()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.csv_fields()).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// `(csv, json)` paths for an `out` stem; any extension is replaced.
pub fn report_paths(out: &Path) -> (PathBuf, PathBuf) {
    (out.with_extension("csv"), out.with_extension("json"))
}

/// Data, weights and Γ shared by every cell of one seed.
struct SeedContext {
    xt: DenseMatrix,
    w: DenseMatrix,
    gamma: Option<GammaEstimate>,
}

#[derive(Debug, Clone, Copy)]
enum Cell {
    Quantize { seed_idx: usize, bits: u32, method: Method },
    Gamma { seed_idx: usize },
    Scaling { seed_idx: usize, m: usize, n0: usize, bits: u32, method: Method },
}

fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    match cfg.kind {
        ExperimentKind::Gamma => {
            out.extend((0..cfg.seeds.len()).map(|seed_idx| Cell::Gamma { seed_idx }));
        }
        ExperimentKind::Scaling => {
            for (m, n0) in cfg.scaling_grid() {
                for seed_idx in 0..cfg.seeds.len() {
                    for &method in &cfg.methods {
                        out.push(Cell::Scaling { seed_idx, m, n0, bits: cfg.bits[0], method });
                    }
                }
            }
        }
        _ => {
            for &bits in &cfg.bits {
                for seed_idx in 0..cfg.seeds.len() {
                    for &method in &cfg.methods {
                        out.push(Cell::Quantize { seed_idx, bits, method });
                    }
                }
            }
        }
    }
    out
}

fn cell_seed(cfg: &ExperimentConfig, seed_idx: usize) -> u64 {
    derive_seed(cfg.master_seed, &[cfg.seeds[seed_idx]])
}

fn load_data(cfg: &ExperimentConfig, m: usize, n0: usize, seed: u64) -> Result<DenseMatrix> {
    let xt = match (&cfg.distribution, &cfg.data_path) {
        (Distribution::File, Some(p)) => read_matrix_csv(p)?,
        (d, _) => gen_data(*d, m, n0, seed)?,
    };
    if xt.shape() != (m, n0) {
        return Err(Error::InvalidDims(format!(
            "data file is {}x{}, config says {m}x{n0}",
            xt.rows(),
            xt.cols()
        )));
    }
    Ok(xt)
}

fn load_weights(cfg: &ExperimentConfig, n0: usize, n1: usize, seed: u64) -> Result<DenseMatrix> {
    let w = match &cfg.weights_path {
        Some(p) => read_matrix_csv(p)?,
        None => gen_weights(n0, n1, seed),
    };
    if w.shape() != (n0, n1) {
        return Err(Error::InvalidDims(format!(
            "weights file is {}x{}, config says {n0}x{n1}",
            w.rows(),
            w.cols()
        )));
    }
    Ok(w)
}

fn seed_context(cfg: &ExperimentConfig, seed_idx: usize) -> Result<SeedContext> {
    let seed = cell_seed(cfg, seed_idx);
    let xt = load_data(cfg, cfg.m, cfg.n0, seed)?;
    let w = load_weights(cfg, cfg.n0, cfg.n1, seed)?;
    let gamma = match cfg.kind {
        ExperimentKind::Neuron | ExperimentKind::Layer | ExperimentKind::Gamma => {
            Some(gamma_bounds(&xt, cfg.gamma_samples, seed))
        }
        _ => None,
    };
    Ok(SeedContext { xt, w, gamma })
}

/// Median wall-clock milliseconds of `reps` runs of `f`, plus the last result.
fn timed<T>(reps: usize, mut f: impl FnMut() -> T) -> (f64, T) {
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        last = Some(f());
        times.push(t.elapsed().as_secs_f64() * 1e3);
    }
    times.sort_by(f64::total_cmp);
    (times[times.len() / 2], last.expect("at least one run"))
}

/// Checks every column of a quantized layer against the pre-processing
/// contract; returns a description of the first failure.
fn layer_contract(xt: &DenseMatrix, w: &DenseMatrix, r: &LayerQuantizationResult) -> Option<String> {
    let m = xt.rows();
    for (j, rec) in r.per_neuron.iter().enumerate() {
        let wj = w.column(j);
        let res = PreprocessResult::assemble(
            xt,
            &wj,
            r.w_hat.column(j),
            rec.iterations,
            r.method,
            r.c_shared,
            rec.fell_back,
        );
        let c = verify_preprocess_contract(xt, &wj, &res, r.c_shared, m);
        if !c.all_passed() {
            return Some(format!("contract violated on neuron {j}: {c:?}"));
        }
    }
    None
}

fn run_quantize_cell(
    cfg: &ExperimentConfig,
    ctx: &SeedContext,
    seed: u64,
    bits: u32,
    method: Method,
    row: SweepRow,
) -> SweepRow {
    let opts = LayerOptions {
        exec: Execution::Sequential,
        seed,
    };
    let reps = if cfg.timing_enabled() { cfg.repetitions.max(3) } else { 1 };
    let (ms, result) = timed(reps, || quantize_layer_with(&ctx.xt, &ctx.w, bits, method, &opts));
    let r = match result {
        Ok(r) => r,
        Err(e) => return row.failed(&e),
    };
    let mut row = SweepRow {
        ms: if cfg.timing_enabled() { ms } else { 0.0 },
        sat_count: Some(r.per_neuron.iter().map(|p| p.saturated_count).sum()),
        iters: Some(r.per_neuron.iter().map(|p| p.iterations).sum()),
        ..row
    };
    let gamma = ctx.gamma.as_ref().expect("quantize cells carry Γ");
    row.gamma_exact = gamma.exact;
    row.gamma_lower = Some(gamma.monte_carlo_lower);
    row.gamma_upper = Some(gamma.upper);
    match evaluate_bounds_with(&ctx.xt, &ctx.w, &r.q, &r.alphabet, gamma, seed) {
        Ok(rep) => {
            row.abs_err = Some(rep.absolute);
            row.rel_err = Some(rep.relative);
            row.bound_det = Some(rep.bound_deterministic);
            row.bound_gauss = Some(rep.bound_gaussian).filter(|v| v.is_finite());
        }
        Err(e) => {
            if let Error::BoundViolated { measured, bound } = e {
                row.abs_err = Some(measured);
                row.bound_det = Some(bound);
            }
            return row.failed(&e);
        }
    }
    if let Some(msg) = layer_contract(&ctx.xt, &ctx.w, &r) {
        row.violation = true;
        row.error = Some(msg);
    }
    row
}

fn two_layer_net(n0: usize, n1: usize, seed: u64, activation: Activation) -> Result<NetworkSpec> {
    NetworkSpec::new(vec![
        NetworkLayer {
            weights: gen_weights(n0, n1, derive_seed(seed, &[0])),
            activation,
        },
        NetworkLayer {
            weights: gen_weights(n1, n1, derive_seed(seed, &[1])),
            activation: Activation::Identity,
        },
    ])
}

fn run_network_cell(
    cfg: &ExperimentConfig,
    ctx: &SeedContext,
    seed: u64,
    bits: u32,
    method: Method,
    row: SweepRow,
) -> SweepRow {
    let go = || -> Result<(f64, SweepRow)> {
        let net = two_layer_net(cfg.n0, cfg.n1, seed, cfg.activation.unwrap_or(Activation::Relu))?;
        let opts = LayerOptions {
            exec: Execution::Sequential,
            seed,
        };
        let propagation = cfg.propagation.unwrap_or(Propagation::Propagated);
        let reps = if cfg.timing_enabled() { cfg.repetitions.max(3) } else { 1 };
        let (ms, nq) = timed(reps, || quantize_network_with(&net, &ctx.xt, bits, method, propagation, &opts));
        let nq = nq?;
        let qnet = nq.quantized_network(&net)?;
        let a = net.forward(&ctx.xt)?;
        let b = qnet.forward(&ctx.xt)?;
        let abs = a.sub(&b)?.frobenius();
        let den = a.frobenius();
        let layers = nq.layers.iter().flat_map(|l| &l.per_neuron);
        let (sat, iters) = layers.fold((0, 0), |(s, i), p| (s + p.saturated_count, i + p.iterations));
        Ok((
            ms,
            SweepRow {
                abs_err: Some(abs),
                rel_err: Some(if den > 0.0 { abs / den } else { abs }),
                sat_count: Some(sat),
                iters: Some(iters),
                ..row.clone()
            },
        ))
    };
    match go() {
        Ok((ms, mut r)) => {
            r.ms = if cfg.timing_enabled() { ms } else { 0.0 };
            r
        }
        Err(e) => row.failed(&e),
    }
}

fn run_scaling_cell(cfg: &ExperimentConfig, seed: u64, m: usize, n0: usize, bits: u32, method: Method, row: SweepRow) -> SweepRow {
    let go = || -> Result<SweepRow> {
        let xt = load_data(cfg, m, n0, seed)?;
        let w = load_weights(cfg, n0, 1, seed)?.column(0);
        let c = w.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let wm = DenseMatrix::from_columns(&[&w])?;
        let run = || -> Result<(Vec<f64>, usize)> {
            match method {
                Method::Baseline => preprocess_baseline(&xt, &w, c).map(|r| (r.w_hat.into_inner(), r.iterations)),
                Method::Accelerated => preprocess_accelerated(&xt, &w, c).map(|r| (r.w_hat.into_inner(), r.iterations)),
                Method::Linf => layer_linf_preprocess_with(&xt, &wm, seed, Execution::Sequential)
                    .map(|r| (r.w_hat.column(0), r.stage1[0].iterations + r.stage2[0].iterations)),
            }
        };
        let (ms, out) = timed(cfg.repetitions.max(3), run);
        let (w_hat, iters) = out?;
        let cap = w_hat.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let alphabet = build_uniform_bbit(bits, cap)?;
        let q = alphabet.quantize_slice(&w_hat);
        let d: Vec<f64> = w.iter().zip(&q).map(|(a, b)| a - b).collect();
        let abs = norm2(&xt.matvec(&d));
        let den = norm2(&xt.matvec(&w));
        Ok(SweepRow {
            abs_err: Some(abs),
            rel_err: Some(if den > 0.0 { abs / den } else { abs }),
            sat_count: Some(w_hat.iter().filter(|v| v.abs() == cap).count()),
            iters: Some(iters),
            ms,
            ..row.clone()
        })
    };
    go().unwrap_or_else(|e| row.failed(&e))
}

fn run_cell(cfg: &ExperimentConfig, contexts: &[std::result::Result<SeedContext, Error>], cell: Cell) -> SweepRow {
    let kind = cfg.kind;
    match cell {
        Cell::Quantize { seed_idx, bits, method } => {
            let row = SweepRow::blank(kind, Some(method), Some(bits), (cfg.m, cfg.n0, cfg.n1), cfg.seeds[seed_idx]);
            let ctx = match &contexts[seed_idx] {
                Ok(c) => c,
                Err(e) => return row.failed(e),
            };
            let seed = cell_seed(cfg, seed_idx);
            if kind == ExperimentKind::Network {
                run_network_cell(cfg, ctx, seed, bits, method, row)
            } else {
                run_quantize_cell(cfg, ctx, seed, bits, method, row)
            }
        }
        Cell::Gamma { seed_idx } => {
            let mut row = SweepRow::blank(kind, None, None, (cfg.m, cfg.n0, cfg.n1), cfg.seeds[seed_idx]);
            match &contexts[seed_idx] {
                Ok(ctx) => {
                    let g = ctx.gamma.as_ref().expect("gamma cells carry Γ");
                    row.gamma_exact = g.exact;
                    row.gamma_lower = Some(g.monte_carlo_lower);
                    row.gamma_upper = Some(g.upper);
                    row
                }
                Err(e) => row.failed(e),
            }
        }
        Cell::Scaling { seed_idx, m, n0, bits, method } => {
            let row = SweepRow::blank(kind, Some(method), Some(bits), (m, n0, 1), cfg.seeds[seed_idx]);
            run_scaling_cell(cfg, cell_seed(cfg, seed_idx), m, n0, bits, method, row)
        }
    }
}

/// Appends rows to the CSV report in cell order as chunks complete.
struct RowWriter {
    csv: Option<csv::Writer<fs::File>>,
}

impl RowWriter {
    fn open(path: Option<&Path>) -> Result<Self> {
        let csv = match path {
            Some(p) => {
                let mut w = csv::Writer::from_path(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                w.write_record(CSV_HEADER).map_err(|e| Error::Io(e.to_string()))?;
                Some(w)
            }
            None => None,
        };
        Ok(Self { csv })
    }

    fn append(&mut self, rows: &[SweepRow]) -> Result<()> {
        if let Some(w) = &mut self.csv {
            for r in rows {
                w.write_record(r.csv_fields()).map_err(|e| Error::Io(e.to_string()))?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs every cell of the sweep and, when `out` is set, writes
/// `<out>.csv` (row by row) and `<out>.json`.
///
/// Cells run on `workers` threads, except for `scaling` sweeps, which run
/// one cell at a time so the timings do not compete for cores.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    let workers = match config.kind {
        ExperimentKind::Scaling => 1,
        _ => config.workers.unwrap_or_else(default_workers).max(1),
    };
    let paths = config.out.as_deref().map(report_paths);
    if let Some((csv_path, _)) = &paths {
        if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
    }
    let mut writer = RowWriter::open(paths.as_ref().map(|p| p.0.as_path()))?;
    let all = cells(config);
    let rows = with_workers(workers, |exec| -> Result<Vec<SweepRow>> {
        let contexts = match config.kind {
            ExperimentKind::Scaling => Vec::new(),
            _ => map_indexed(exec, config.seeds.len(), |i| seed_context(config, i)),
        };
        let chunk = 4 * workers;
        let mut rows = Vec::with_capacity(all.len());
        for block in all.chunks(chunk) {
            let done = map_indexed(exec, block.len(), |i| run_cell(config, &contexts, block[i]));
            writer.append(&done)?;
            rows.extend(done);
        }
        Ok(rows)
    })?;
    let report = SweepReport {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: config.master_seed,
        rows,
    };
    if let Some((_, json_path)) = &paths {
        let mut f = fs::File::create(json_path)?;
        f.write_all(report.to_json_string().as_bytes())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::csv_io::write_matrix_csv;

    fn config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn hand_instance_from_files() {
        let dir = tempfile::tempdir().unwrap();
        let x = dir.path().join("x.csv");
        let w = dir.path().join("w.csv");
        write_matrix_csv(&x, &DenseMatrix::from_rows(&[[1.0, 1.0, 1.0]]).unwrap()).unwrap();
        write_matrix_csv(&w, &DenseMatrix::from_columns(&[[0.1, 0.2, 0.3]]).unwrap()).unwrap();
        let mut cfg = config(
            r#"{"kind":"neuron","distribution":"file","m":1,"N0":3,"bits":[1],
                "methods":["baseline"],"seeds":[0]}"#,
        );
        cfg.data_path = Some(x);
        cfg.weights_path = Some(w);
        let rep = run_sweep(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 1);
        let r = &rep.rows[0];
        assert!(r.error.is_none(), "{:?}", r.error);
        assert!((r.abs_err.unwrap() - 0.3).abs() <= 1e-12);
    }

    #[test]
    fn gamma_row_is_a_sandwich() {
        let rep = run_sweep(&config(r#"{"kind":"gamma","m":2,"N0":6,"seeds":[3]}"#)).unwrap();
        let r = &rep.rows[0];
        let (lo, ex, up) = (r.gamma_lower.unwrap(), r.gamma_exact.unwrap(), r.gamma_upper.unwrap());
        assert!(lo <= ex + 1e-12 && ex <= up + 1e-12);
    }

    #[test]
    fn row_count_and_order() {
        let cfg = config(
            r#"{"kind":"layer","m":3,"N0":24,"N1":2,"bits":[1,3],
                "methods":["baseline","accelerated","linf"],"seeds":[5,6]}"#,
        );
        let rep = run_sweep(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 2 * 3 * 2);
        assert_eq!(rep.failures(), 0);
        assert_eq!(rep.rows[0].bits, Some(1));
        assert_eq!(rep.rows[0].method, Some(Method::Baseline));
        assert_eq!(rep.rows[1].method, Some(Method::Accelerated));
        assert_eq!(rep.rows[3].seed, 6);
        assert_eq!(rep.rows[6].bits, Some(3));
        assert!(rep.rows.iter().all(|r| r.ms == 0.0));
    }

    #[test]
    fn failures_become_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(
            r#"{"kind":"neuron","distribution":"file","m":2,"N0":5,"bits":[2],
                "methods":["baseline"],"seeds":[0,1]}"#,
        );
        cfg.data_path = Some(dir.path().join("missing.csv"));
        let rep = run_sweep(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows.iter().all(|r| r.error.as_deref().unwrap().contains("I/O")));
    }

    #[test]
    fn files_match_report_and_workers() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(
            r#"{"kind":"neuron","m":4,"N0":40,"bits":[2,3],"methods":["accelerated","linf"],"seeds":[1,2,3]}"#,
        );
        cfg.out = Some(dir.path().join("a"));
        cfg.workers = Some(1);
        let one = run_sweep(&cfg).unwrap();
        let csv1 = fs::read(dir.path().join("a.csv")).unwrap();
        let json1 = fs::read(dir.path().join("a.json")).unwrap();
        assert_eq!(csv1, one.to_csv_string().into_bytes());
        assert_eq!(json1, one.to_json_string().into_bytes());
        cfg.workers = Some(4);
        run_sweep(&cfg).unwrap();
        assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), csv1);
        assert_eq!(fs::read(dir.path().join("a.json")).unwrap(), json1);
    }

    #[test]
    fn scaling_rows_are_timed() {
        let cfg = config(
            r#"{"kind":"scaling","m":2,"N0":32,"n0_values":[16,32],"bits":[2],
                "methods":["accelerated"],"seeds":[0]}"#,
        );
        let rep = run_sweep(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert_eq!(rep.rows[1].n0, 32);
        assert!(rep.rows.iter().all(|r| r.error.is_none() && r.ms >= 0.0));
    }

    #[test]
    fn network_rows() {
        let cfg = config(
            r#"{"kind":"network","m":4,"N0":32,"N1":8,"bits":[4],"methods":["baseline"],"seeds":[0]}"#,
        );
        let rep = run_sweep(&cfg).unwrap();
        let r = &rep.rows[0];
        assert!(r.error.is_none(), "{:?}", r.error);
        assert!(r.rel_err.unwrap() < 1.0);
    }
}

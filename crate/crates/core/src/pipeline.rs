//! Neuron, layer and network quantization: pre-process, then round with a
//! single uniform alphabet whose extreme elements equal the cap.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crate::preprocess::Method;

use crate::error::{Error, Result};
use crate::linalg::{norm2, norm_inf, rank, DenseMatrix, DenseVector};
use crate::linf::layer_linf_preprocess_with;
use crate::par::{map_indexed, Execution};
use crate::preprocess::{preprocess_accelerated, preprocess_baseline, PreprocessResult};
use crate::quantizer::{build_uniform_bbit, Alphabet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LayerOptions {
    pub exec: Execution,
    /// Seeds the tie-breaking vectors of the ℓ∞ route; unused by the walks.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronRecord {
    pub saturated_count: usize,
    pub data_residual: f64,
    /// `‖Xᵀw − Xᵀq‖₂`.
    pub quantization_error: f64,
    pub iterations: usize,
    pub fell_back: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerQuantizationResult {
    pub q: DenseMatrix,
    pub w_hat: DenseMatrix,
    pub c_shared: f64,
    pub per_neuron: Vec<NeuronRecord>,
    pub alphabet: Alphabet,
    pub method: Method,
}

impl LayerQuantizationResult {
    /// `‖XᵀW − XᵀQ‖_F` from the per-neuron errors.
    pub fn frobenius_error(&self) -> f64 {
        self.per_neuron
            .iter()
            .map(|r| r.quantization_error * r.quantization_error)
            .sum::<f64>()
            .sqrt()
    }
}

fn check_layer(xt: &DenseMatrix, w: &DenseMatrix) -> Result<()> {
    if xt.cols() != w.rows() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} columns, weights have {} rows",
            xt.cols(),
            w.rows()
        )));
    }
    if w.cols() == 0 || xt.rows() == 0 {
        return Err(Error::InvalidDims("empty layer or data".into()));
    }
    Ok(())
}

fn output_error(xt: &DenseMatrix, w: &[f64], q: &[f64]) -> f64 {
    let d: Vec<f64> = w.iter().zip(q).map(|(a, b)| a - b).collect();
    norm2(&xt.matvec(&d))
}

/// Pre-processes one neuron with cap `c` by one of the kernel walks.
fn walk(xt: &DenseMatrix, w: &[f64], c: f64, method: Method) -> Result<PreprocessResult> {
    match method {
        Method::Baseline => preprocess_baseline(xt, w, c),
        Method::Accelerated => preprocess_accelerated(xt, w, c),
        Method::Linf => unreachable!("the ℓ∞ route is layer-level"),
    }
}

/// `q = Q_ĉ(ŵ)` with `ĉ = ‖w‖_∞` for the walks and the ℓ∞ minimum for `linf`.
pub fn quantize_neuron(
    xt: &DenseMatrix,
    w: &[f64],
    bits: u32,
    method: Method,
) -> Result<(DenseVector, PreprocessResult)> {
    let wm = DenseMatrix::from_columns(&[w])?;
    let layer = quantize_layer_with(xt, &wm, bits, method, &LayerOptions::default())?;
    let q = DenseVector::from(layer.q.column(0));
    let w_hat = layer.w_hat.column(0);
    let rec = &layer.per_neuron[0];
    let result = PreprocessResult {
        saturated: (0..w_hat.len()).filter(|&i| w_hat[i].abs() == layer.c_shared).collect(),
        w_hat: DenseVector::from(w_hat),
        iterations: rec.iterations,
        data_residual: rec.data_residual,
        method,
        cap: layer.c_shared,
        fell_back: rec.fell_back,
    };
    Ok((q, result))
}

pub fn quantize_layer(
    xt: &DenseMatrix,
    w: &DenseMatrix,
    bits: u32,
    method: Method,
) -> Result<LayerQuantizationResult> {
    quantize_layer_with(xt, w, bits, method, &LayerOptions::default())
}

/// Quantizes every column of `w` against data `xt` with the shared cap
/// `Ĉ = ‖W‖_∞` (or the stage-1 ℓ∞ cap for `linf`).
pub fn quantize_layer_with(
    xt: &DenseMatrix,
    w: &DenseMatrix,
    bits: u32,
    method: Method,
    opts: &LayerOptions,
) -> Result<LayerQuantizationResult> {
    check_layer(xt, w)?;
    if let Some(i) = w.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let (n0, n1) = w.shape();
    let (c_shared, columns): (f64, Vec<PreprocessResult>) = match method {
        Method::Linf => {
            let r = layer_linf_preprocess_with(xt, w, opts.seed, opts.exec)?;
            let cols = (0..n1)
                .map(|j| {
                    let iterations = r.stage1[j].iterations + r.stage2[j].iterations;
                    PreprocessResult::assemble(
                        xt,
                        &w.column(j),
                        r.w_hat.column(j),
                        iterations,
                        Method::Linf,
                        r.c_hat,
                        false,
                    )
                })
                .collect();
            (r.c_hat, cols)
        }
        _ => {
            let c = w.max_abs();
            let cols = map_indexed(opts.exec, n1, |j| walk(xt, &w.column(j), c, method))
                .into_iter()
                .collect::<Result<_>>()?;
            (c, cols)
        }
    };
    if c_shared == 0.0 {
        return Err(Error::InvalidParameter("all weights are zero".into()));
    }
    let alphabet = build_uniform_bbit(bits, c_shared)?;
    let mut q = DenseMatrix::zeros(n0, n1);
    let mut w_hat = DenseMatrix::zeros(n0, n1);
    let mut per_neuron = Vec::with_capacity(n1);
    for (j, r) in columns.iter().enumerate() {
        let qj = alphabet.quantize_slice(&r.w_hat);
        per_neuron.push(NeuronRecord {
            saturated_count: r.saturated.len(),
            data_residual: r.data_residual,
            quantization_error: output_error(xt, &w.column(j), &qj),
            iterations: r.iterations,
            fell_back: r.fell_back,
        });
        q.set_column(j, &qj);
        w_hat.set_column(j, &r.w_hat);
    }
    Ok(LayerQuantizationResult {
        q,
        w_hat,
        c_shared,
        per_neuron,
        alphabet,
        method,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Relu,
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Identity => "identity",
            Activation::Relu => "relu",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "linear" => Ok(Activation::Identity),
            "relu" => Ok(Activation::Relu),
            other => Err(Error::UnknownActivation(other.to_string())),
        }
    }
}

/// Entrywise activation. Both supported activations are 1-Lipschitz.
pub fn apply_activation(tag: Activation, m: &DenseMatrix) -> DenseMatrix {
    match tag {
        Activation::Identity => m.clone(),
        Activation::Relu => m.map(|v| v.max(0.0)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLayer {
    /// `N_{ℓ−1} × N_ℓ`.
    pub weights: DenseMatrix,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    layers: Vec<NetworkLayer>,
}

impl NetworkSpec {
    pub fn new(layers: Vec<NetworkLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidDims("network has no layers".into()));
        }
        for (l, pair) in layers.windows(2).enumerate() {
            if pair[0].weights.cols() != pair[1].weights.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "layer {} outputs {} features, layer {} expects {}",
                    l,
                    pair[0].weights.cols(),
                    l + 1,
                    pair[1].weights.rows()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[NetworkLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.rows()
    }

    /// Same activations, new weights.
    pub fn with_weights(&self, weights: Vec<DenseMatrix>) -> Result<Self> {
        if weights.len() != self.layers.len() {
            return Err(Error::DimensionMismatch("one weight matrix per layer".into()));
        }
        Self::new(
            weights
                .into_iter()
                .zip(&self.layers)
                .map(|(w, l)| NetworkLayer {
                    weights: w,
                    activation: l.activation,
                })
                .collect(),
        )
    }

    /// Outputs for a batch given as rows of `data` (`m × N₀`).
    pub fn forward(&self, data: &DenseMatrix) -> Result<DenseMatrix> {
        let mut act = data.clone();
        for layer in &self.layers {
            act = apply_activation(layer.activation, &act.matmul(&layer.weights)?);
        }
        Ok(act)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Propagation {
    /// Layer `ℓ` sees activations of the original network.
    Analytic,
    /// Layer `ℓ` sees activations of the already-quantized prefix.
    #[default]
    Propagated,
}

impl FromStr for Propagation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Propagation::Analytic),
            "propagated" => Ok(Propagation::Propagated),
            other => Err(Error::InvalidParameter(format!("unknown propagation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkQuantization {
    pub layers: Vec<LayerQuantizationResult>,
    /// Layers whose input activations were rank deficient; those layers were
    /// quantized with the baseline walk.
    pub warnings: Vec<Error>,
}

impl NetworkQuantization {
    pub fn quantized_network(&self, net: &NetworkSpec) -> Result<NetworkSpec> {
        net.with_weights(self.layers.iter().map(|l| l.q.clone()).collect())
    }
}

pub fn quantize_network(
    net: &NetworkSpec,
    data: &DenseMatrix,
    bits: u32,
    method: Method,
    propagation: Propagation,
) -> Result<NetworkQuantization> {
    quantize_network_with(net, data, bits, method, propagation, &LayerOptions::default())
}

/// Quantizes layer by layer, each against the activations that feed it.
pub fn quantize_network_with(
    net: &NetworkSpec,
    data: &DenseMatrix,
    bits: u32,
    method: Method,
    propagation: Propagation,
    opts: &LayerOptions,
) -> Result<NetworkQuantization> {
    if data.cols() != net.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} features, network expects {}",
            data.cols(),
            net.input_dim()
        )));
    }
    let samples = data.rows();
    let mut original = data.clone();
    let mut quantized = data.clone();
    let mut layers = Vec::with_capacity(net.layers.len());
    let mut warnings = Vec::new();
    for (l, layer) in net.layers.iter().enumerate() {
        let input = match propagation {
            Propagation::Analytic => &original,
            Propagation::Propagated => &quantized,
        };
        let r = rank(input);
        let layer_method = if r < samples {
            warnings.push(Error::DegenerateActivations {
                layer: l,
                rank: r,
                samples,
            });
            Method::Baseline
        } else {
            method
        };
        let opts_l = LayerOptions {
            seed: crate::seeding::derive_seed(opts.seed, &[l as u64]),
            ..*opts
        };
        let result = quantize_layer_with(input, &layer.weights, bits, layer_method, &opts_l)?;
        original = apply_activation(layer.activation, &original.matmul(&layer.weights)?);
        quantized = apply_activation(layer.activation, &quantized.matmul(&result.q)?);
        layers.push(result);
    }
    Ok(NetworkQuantization { layers, warnings })
}

/// `‖Φ(data) − Φ_Q(data)‖_F / ‖Φ(data)‖_F`.
pub fn network_relative_error(
    net: &NetworkSpec,
    quantized: &NetworkSpec,
    data: &DenseMatrix,
) -> Result<f64> {
    let a = net.forward(data)?;
    let b = quantized.forward(data)?;
    let num = a.sub(&b)?.frobenius();
    let den = a.frobenius();
    Ok(if den > 0.0 { num / den } else { num })
}

/// Appends a constant-one input feature so a bias can ride along as an extra
/// weight row.
pub fn append_bias_feature(data: &DenseMatrix) -> DenseMatrix {
    let (m, n) = data.shape();
    DenseMatrix::from_fn(m, n + 1, |i, j| if j < n { data[(i, j)] } else { 1.0 })
}

/// Stacks the bias vector below the weight matrix.
pub fn append_bias_row(w: &DenseMatrix, bias: &[f64]) -> Result<DenseMatrix> {
    let (n0, n1) = w.shape();
    if bias.len() != n1 {
        return Err(Error::DimensionMismatch(format!(
            "bias has {} entries, layer has {n1} neurons",
            bias.len()
        )));
    }
    Ok(DenseMatrix::from_fn(n0 + 1, n1, |i, j| if i < n0 { w[(i, j)] } else { bias[j] }))
}

/// Largest magnitude of a neuron; the single-neuron cap.
pub fn neuron_cap(w: &[f64]) -> f64 {
    norm_inf(w)
}

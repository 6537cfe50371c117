use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::data::Distribution;
use crate::error::{Error, Result};
use crate::pipeline::{Activation, Method, Propagation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// One neuron (`N₁ = 1`) per cell.
    Neuron,
    /// An `N₀ × N₁` layer per cell.
    Layer,
    /// Two layers `N₀ → N₁ → N₁` (ReLU, then identity) quantized in sequence.
    Network,
    /// Γ estimates of the data only; one row per seed.
    Gamma,
    /// Pre-processing time of one neuron over `n0_values × m_values`.
    Scaling,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Neuron => "neuron",
            ExperimentKind::Layer => "layer",
            ExperimentKind::Network => "network",
            ExperimentKind::Gamma => "gamma",
            ExperimentKind::Scaling => "scaling",
        })
    }
}

fn default_n1() -> usize {
    1
}

fn default_repetitions() -> usize {
    3
}

fn default_gamma_samples() -> usize {
    64
}

fn default_distribution() -> Distribution {
    Distribution::Gaussian
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_distribution")]
    pub distribution: Distribution,
    pub m: usize,
    #[serde(rename = "N0", alias = "n0")]
    pub n0: usize,
    #[serde(rename = "N1", alias = "n1", default = "default_n1")]
    pub n1: usize,
    #[serde(default)]
    pub bits: Vec<u32>,
    #[serde(default)]
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    /// Report path stem; not echoed, so the report does not depend on where
    /// it was written.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub master_seed: u64,
    /// Thread count for the cells; never part of the report.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    /// Time the pre-processing (median of `repetitions` runs). Forced on for
    /// `scaling`; otherwise `ms` is reported as 0 so reports stay
    /// byte-reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_gamma_samples")]
    pub gamma_samples: usize,
    #[serde(default)]
    pub n0_values: Vec<usize>,
    #[serde(default)]
    pub m_values: Vec<usize>,
    #[serde(default)]
    pub data_path: Option<PathBuf>,
    #[serde(default)]
    pub weights_path: Option<PathBuf>,
    #[serde(default)]
    pub propagation: Option<Propagation>,
    #[serde(default)]
    pub activation: Option<Activation>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn timing_enabled(&self) -> bool {
        self.timing || self.kind == ExperimentKind::Scaling
    }

    /// `(m, N₀)` pairs visited by a scaling sweep.
    pub fn scaling_grid(&self) -> Vec<(usize, usize)> {
        let ms = if self.m_values.is_empty() { vec![self.m] } else { self.m_values.clone() };
        let ns = if self.n0_values.is_empty() { vec![self.n0] } else { self.n0_values.clone() };
        ms.iter().flat_map(|&m| ns.iter().map(move |&n| (m, n))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let dims = |m: usize, n0: usize| -> Result<()> {
            if m == 0 || n0 == 0 || self.n1 == 0 {
                return Err(Error::InvalidDims(format!(
                    "m = {m}, N0 = {n0}, N1 = {} must be positive",
                    self.n1
                )));
            }
            if n0 <= m {
                return Err(Error::InvalidDims(format!("need N0 > m, got N0 = {n0}, m = {m}")));
            }
            if self.distribution == Distribution::FrameConcat && n0 % m != 0 {
                return Err(Error::InvalidDims(format!("frame_concat needs m | N0, got m = {m}, N0 = {n0}")));
            }
            Ok(())
        };
        if self.kind == ExperimentKind::Scaling {
            for (m, n0) in self.scaling_grid() {
                dims(m, n0)?;
            }
        } else {
            dims(self.m, self.n0)?;
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("seeds must not be empty".into()));
        }
        if self.kind != ExperimentKind::Gamma {
            if self.methods.is_empty() {
                return Err(Error::InvalidParameter("methods must not be empty".into()));
            }
            if self.bits.is_empty() {
                return Err(Error::InvalidParameter("bits must not be empty".into()));
            }
        }
        if let Some(&b) = self.bits.iter().find(|&&b| b == 0 || b > 52) {
            return Err(Error::InvalidParameter(format!("bit depth {b} outside 1..=52")));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidParameter("repetitions must be at least 1".into()));
        }
        if self.kind == ExperimentKind::Neuron && self.n1 != 1 && self.weights_path.is_none() {
            return Err(Error::InvalidDims(format!("neuron sweeps use N1 = 1, got {}", self.n1)));
        }
        if self.kind == ExperimentKind::Network && self.n1 <= self.m {
            return Err(Error::InvalidDims(format!(
                "network hidden width N1 = {} must exceed m = {}",
                self.n1, self.m
            )));
        }
        if self.distribution == Distribution::File && self.data_path.is_none() {
            return Err(Error::InvalidParameter("distribution `file` needs data_path".into()));
        }
        Ok(())
    }
}

//! Experiment configuration, presets, run artifacts, evaluation reports and
//! the self-test table behind the `cvqgan` command line.

mod artifacts;
mod eval;
mod selftest;
pub mod svg;

pub use artifacts::{load_run, write_run, RunMeta, RUN_FILES, SVG_FILES};
pub use eval::{evaluate, EvalReport, COLLAPSE_RATIO};
pub use selftest::{run_selftest, CheckResult, FAULT_ENV};

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calo::{self, DataError, DataFormat, ImageSample, ScaleRecord};
use crate::engine::{Architecture, EngineError, GanConfig};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} already exists; pass --force to overwrite")]
    Exists(PathBuf),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0} self-test check(s) failed")]
    Selftest(usize),
}

impl ExperimentError {
    /// 1 for bad input, 2 for numerical failure, 3 for a failed self-test.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Engine(EngineError::NumericalFailure { .. } | EngineError::Grad(_)) => 2,
            ExperimentError::Selftest(_) => 3,
            _ => 1,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Where the training images come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    /// CSV file; when absent a synthetic set is generated.
    pub path: Option<PathBuf>,
    pub format: DataFormat,
    pub n: usize,
    pub peak2_fraction: f64,
    pub seed: u64,
    /// Divide by the dataset maximum before training.
    pub normalize: bool,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            path: None,
            format: DataFormat::Reduced,
            n: 1000,
            peak2_fraction: calo::DEFAULT_PEAK2_FRACTION,
            seed: 7,
            normalize: true,
        }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        match &self.path {
            Some(p) if !p.is_file() => errs.push(format!("dataset path {} does not exist", p.display())),
            Some(_) => {}
            None => {
                if self.n == 0 {
                    errs.push("dataset.n must be at least 1".into());
                }
                if !(0.0..=1.0).contains(&self.peak2_fraction) {
                    errs.push(format!("dataset.peak2_fraction must be in [0, 1], got {}", self.peak2_fraction));
                }
            }
        }
        errs
    }

    pub fn load(&self) -> Result<(Vec<ImageSample>, Option<ScaleRecord>), ExperimentError> {
        let raw = match &self.path {
            Some(p) => calo::load_dataset(p, self.format)?,
            None => calo::synth_dataset(self.n, self.peak2_fraction, self.seed)?,
        };
        if self.normalize {
            let (data, scale) = calo::normalize(&raw)?;
            Ok((data, Some(scale)))
        } else {
            Ok((raw, None))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Run directory; defaults to `runs/<name>`.
    pub out: Option<PathBuf>,
    pub emit_svg: bool,
    pub gan: GanConfig,
    pub dataset: DatasetSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "run".into(),
            out: None,
            emit_svg: true,
            gan: GanConfig::default(),
            dataset: DatasetSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| Path::new("runs").join(&self.name))
    }

    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.name.trim().is_empty() {
            errs.push("name must not be empty".into());
        }
        errs.extend(self.gan.validate());
        errs.extend(self.dataset.validate());
        errs
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Overlays the keys present in `text` (TOML) on top of `self`.
    pub fn merge_toml(&self, text: &str) -> Result<Self, ExperimentError> {
        let overlay: toml::Table = text.parse().map_err(|e: toml::de::Error| ExperimentError::Config(e.to_string()))?;
        let mut base: toml::Table = toml::Table::try_from(self).map_err(|e| ExperimentError::Config(e.to_string()))?;
        merge_tables(&mut base, overlay);
        base.try_into().map_err(|e: toml::de::Error| ExperimentError::Config(e.to_string()))
    }

    /// Reads a TOML config, or the `config` of a previous run's `run_meta.json`.
    pub fn merge_file(&self, path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        if path.extension().is_some_and(|e| e == "json") {
            let meta: RunMeta = serde_json::from_str(&text)
                .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
            return Ok(meta.config);
        }
        self.merge_toml(&text)
            .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))
    }
}

fn merge_tables(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// The four desk-scale reproductions.
pub const PRESETS: [&str; 4] = ["fully-quantum-dg5", "hybrid-dg5", "hybrid-dg3", "hybrid-latent3"];

pub fn preset(name: &str) -> Result<ExperimentConfig, ExperimentError> {
    let gan = match name {
        "fully-quantum-dg5" => GanConfig {
            architecture: Architecture::FullyQuantum,
            gen_depth: 5,
            ..GanConfig::default()
        },
        "hybrid-dg5" => GanConfig {
            gen_depth: 5,
            ..GanConfig::default()
        },
        "hybrid-dg3" => GanConfig {
            gen_depth: 3,
            ..GanConfig::default()
        },
        // The larger generator needs a less noisy, faster-learning critic to
        // settle within 200 epochs.
        "hybrid-latent3" => GanConfig {
            gen_depth: 8,
            latent_dim: 3,
            batch_size: 32,
            classical_learning_rate: 0.01,
            ..GanConfig::default()
        },
        other => {
            return Err(ExperimentError::Config(format!(
                "unknown preset {other:?}; available: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(ExperimentConfig {
        name: name.to_string(),
        gan,
        ..ExperimentConfig::default()
    })
}

use serde::{Deserialize, Serialize};

use crate::fock::DEFAULT_AMPLITUDE_BUDGET;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Architecture {
    /// Generator state flows straight into a quantum discriminator circuit.
    FullyQuantum,
    /// Generator is measured; a classical network judges the images.
    Hybrid,
}

impl std::str::FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fully-quantum" => Ok(Architecture::FullyQuantum),
            "hybrid" => Ok(Architecture::Hybrid),
            other => Err(format!("unknown architecture {other:?} (expected fully-quantum or hybrid)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GanConfig {
    pub architecture: Architecture,
    pub num_modes: usize,
    pub cutoff: usize,
    pub gen_depth: usize,
    /// Quantum discriminator depth; `None` means the generator depth.
    pub disc_depth: Option<usize>,
    pub latent_dim: usize,
    /// First displaced mode; latent entry `k` goes to mode `(latent_mode + k) % N`.
    pub latent_mode: usize,
    /// Mode measured by the quantum discriminator; `None` means `N - 1`.
    pub readout_mode: Option<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    /// Adam step size for circuit parameters.
    pub learning_rate: f64,
    /// Adam step size for the classical discriminator.
    pub classical_learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub fd_step: f64,
    pub disc_steps: usize,
    pub init_scale: f64,
    pub rng_seed: u64,
    /// Fixed latent draws used for the per-epoch mean image and diversity.
    pub probe_size: usize,
    /// Generated samples kept at the end of training.
    pub sample_count: usize,
}

impl Default for GanConfig {
    fn default() -> Self {
        Self {
            architecture: Architecture::Hybrid,
            num_modes: 3,
            cutoff: 8,
            gen_depth: 5,
            disc_depth: None,
            latent_dim: 1,
            latent_mode: 0,
            readout_mode: None,
            epochs: 200,
            batch_size: 16,
            learning_rate: 0.01,
            classical_learning_rate: 0.001,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            fd_step: 1e-3,
            disc_steps: 1,
            init_scale: 0.05,
            rng_seed: 0,
            probe_size: 64,
            sample_count: 256,
        }
    }
}

impl GanConfig {
    pub fn disc_depth(&self) -> usize {
        self.disc_depth.unwrap_or(self.gen_depth)
    }

    pub fn readout_mode(&self) -> usize {
        self.readout_mode.unwrap_or(self.num_modes.saturating_sub(1))
    }

    pub fn latent_modes(&self) -> Vec<usize> {
        (0..self.latent_dim)
            .map(|k| (self.latent_mode + k) % self.num_modes.max(1))
            .collect()
    }

    /// Every violated invariant, in field order.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let mut need = |ok: bool, msg: String| {
            if !ok {
                errs.push(msg);
            }
        };
        need(self.num_modes >= 1, format!("num_modes must be at least 1, got {}", self.num_modes));
        need(self.cutoff >= 2, format!("cutoff must be at least 2, got {}", self.cutoff));
        let dim = (self.cutoff as f64).powi(self.num_modes as i32);
        need(
            dim <= DEFAULT_AMPLITUDE_BUDGET as f64,
            format!(
                "cutoff^num_modes = {}^{} exceeds the amplitude budget of {DEFAULT_AMPLITUDE_BUDGET}",
                self.cutoff, self.num_modes
            ),
        );
        need(self.gen_depth >= 1, format!("gen_depth must be at least 1, got {}", self.gen_depth));
        need(self.disc_depth() >= 1, format!("disc_depth must be at least 1, got {}", self.disc_depth()));
        need(
            (1..=self.num_modes).contains(&self.latent_dim),
            format!("latent_dim must be in 1..={}, got {}", self.num_modes, self.latent_dim),
        );
        need(
            self.latent_mode < self.num_modes,
            format!("latent_mode {} is not a mode of a {}-mode circuit", self.latent_mode, self.num_modes),
        );
        need(
            self.readout_mode() < self.num_modes,
            format!("readout_mode {} is not a mode of a {}-mode circuit", self.readout_mode(), self.num_modes),
        );
        need(self.batch_size >= 1, format!("batch_size must be at least 1, got {}", self.batch_size));
        for (name, v) in [("learning_rate", self.learning_rate), ("classical_learning_rate", self.classical_learning_rate)] {
            need(v > 0.0 && v.is_finite(), format!("{name} must be positive and finite, got {v}"));
        }
        for (name, v) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            need((0.0..1.0).contains(&v), format!("{name} must be in [0, 1), got {v}"));
        }
        need(
            self.fd_step > 0.0 && self.fd_step < 0.1,
            format!("fd_step must be in (0, 0.1), got {}", self.fd_step),
        );
        need(self.disc_steps >= 1, format!("disc_steps must be at least 1, got {}", self.disc_steps));
        need(
            self.init_scale >= 0.0 && self.init_scale.is_finite(),
            format!("init_scale must be non-negative and finite, got {}", self.init_scale),
        );
        need(self.probe_size >= 2, format!("probe_size must be at least 2, got {}", self.probe_size));
        need(self.sample_count >= 2, format!("sample_count must be at least 2, got {}", self.sample_count));
        errs
    }
}

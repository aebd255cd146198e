//! Quantum GAN engine: generator and discriminator circuits, the classical
//! discriminator, losses, gradients, Adam, and the alternating training loop.

mod adam;
mod config;
mod discriminator;
mod grad;
mod loss;
mod model;
mod train;

pub use adam::{adam_step, Adam, AdamState, ADAM_EPSILON};
pub use config::{Architecture, GanConfig};
pub use discriminator::{sigmoid, ClassicalDiscriminator, HIDDEN_SIZES, LEAKY_SLOPE};
pub use grad::{fd_gradient, fd_gradient_by, GradError};
pub use loss::{clamp_label, disc_loss, disc_loss_label_grads, gen_loss, LABEL_CLAMP};
pub use model::{
    classical_discriminate, diversity, encode_real_sample, generate_image, generator_state,
    layered_fd_gradient, prepare_latent_state, quantum_discriminate,
};
pub use train::{
    train, DiscriminatorParams, EpochRecord, GanTrainer, GradientProbe, TrainingRun,
};

use thiserror::Error;

use crate::cvnn::CvnnError;
use crate::fock::FockError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("{what}: expected {expected}, found {found}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{0} is only available for the hybrid architecture")]
    HybridOnly(&'static str),
    #[error("{0} is only available for the fully quantum architecture")]
    QuantumOnly(&'static str),
    #[error("diversity needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("dataset: {0}")]
    Dataset(String),
    #[error(transparent)]
    Grad(#[from] GradError),
    #[error(transparent)]
    Cvnn(#[from] CvnnError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("non-finite value at epoch {epoch} during {stage}: {detail}")]
    NumericalFailure {
        epoch: usize,
        stage: &'static str,
        detail: String,
        generator: Vec<f64>,
        discriminator: Vec<f64>,
    },
}

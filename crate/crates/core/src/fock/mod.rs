//! Truncated Fock-basis simulation of pure multi-mode bosonic states.
//!
//! Position quadrature convention: `hbar = 2`, so `x = a + a^dagger` and a
//! coherent state `|alpha>` has `<x> = 2 Re(alpha)`.

mod batch;
mod gates;
mod matrices;
#[cfg(test)]
pub(crate) mod oracle;
mod state;

pub use batch::FockBatch;
pub use gates::{
    apply_beamsplitter, apply_displacement, apply_kerr, apply_rotation, apply_squeeze, Gate,
};
#[cfg(test)]
pub(crate) use gates::apply_beamsplitter_blocks;
pub(crate) use gates::{apply_beamsplitter_layout, apply_diagonal, apply_mode_matrix, PairLayout};
pub use matrices::{
    displacement_matrix, kerr_phases, rotation_phases, squeeze_matrix, BeamsplitterBlock,
    BeamsplitterBlocks, ModeMatrix,
};
pub use state::{FockState, StateDump, DEFAULT_AMPLITUDE_BUDGET};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("state needs at least one mode")]
    NoModes,
    #[error("cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),
    #[error("state dimension {cutoff}^{num_modes} exceeds the amplitude budget of {budget}")]
    BudgetExceeded {
        num_modes: usize,
        cutoff: usize,
        budget: usize,
    },
    #[error("expected {expected} amplitudes, found {found}")]
    AmplitudeLength { expected: usize, found: usize },
    #[error("Fock level {level} is outside cutoff {cutoff}")]
    LevelOutOfRange { level: usize, cutoff: usize },
    #[error("mode {mode} out of range for a {num_modes}-mode state")]
    ModeOutOfRange { mode: usize, num_modes: usize },
    #[error("beamsplitter needs two distinct modes, got {0} twice")]
    SameModes(usize),
    #[error("non-finite {0} parameter")]
    NonFiniteParameter(&'static str),
    #[error("squeeze magnitude must be non-negative, got {0}")]
    NegativeSqueeze(f64),
    #[error("a batch needs at least one state")]
    EmptyBatch,
    #[error("state has zero norm")]
    ZeroNorm,
}

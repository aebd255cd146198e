use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrices::{
    displacement_matrix, kerr_phases, rotation_phases, squeeze_matrix, BeamsplitterBlocks,
    ModeMatrix,
};
use super::{FockError, FockState};

/// A parameterized CV gate together with its target mode(s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    /// `R(phi) = exp(i phi n)`
    Rotation { mode: usize, phi: f64 },
    /// `D(alpha) = exp(alpha a^dagger - conj(alpha) a)`
    Displacement { mode: usize, alpha: Complex64 },
    /// `S(r e^{i phi})`
    Squeeze { mode: usize, r: f64, phi: f64 },
    /// `exp(theta (e^{i phi} a^dagger b - e^{-i phi} a b^dagger))`
    Beamsplitter {
        mode_a: usize,
        mode_b: usize,
        theta: f64,
        phi: f64,
    },
    /// `K(kappa) = exp(i kappa n^2)`
    Kerr { mode: usize, kappa: f64 },
}

impl Gate {
    pub fn validate(&self, num_modes: usize) -> Result<(), FockError> {
        let check = |mode: usize| {
            if mode < num_modes {
                Ok(())
            } else {
                Err(FockError::ModeOutOfRange { mode, num_modes })
            }
        };
        match *self {
            Gate::Rotation { mode, phi } => {
                check(mode)?;
                finite("rotation angle", phi)
            }
            Gate::Kerr { mode, kappa } => {
                check(mode)?;
                finite("Kerr strength", kappa)
            }
            Gate::Displacement { mode, alpha } => {
                check(mode)?;
                if alpha.re.is_finite() && alpha.im.is_finite() {
                    Ok(())
                } else {
                    Err(FockError::NonFiniteParameter("displacement"))
                }
            }
            Gate::Squeeze { mode, r, phi } => {
                check(mode)?;
                finite("squeeze magnitude", r)?;
                finite("squeeze angle", phi)?;
                if r < 0.0 {
                    return Err(FockError::NegativeSqueeze(r));
                }
                Ok(())
            }
            Gate::Beamsplitter {
                mode_a,
                mode_b,
                theta,
                phi,
            } => {
                check(mode_a)?;
                check(mode_b)?;
                if mode_a == mode_b {
                    return Err(FockError::SameModes(mode_a));
                }
                finite("beamsplitter angle", theta)?;
                finite("beamsplitter phase", phi)
            }
        }
    }

    /// Heuristic note when an energy-injecting gate is likely to push
    /// population past the cutoff: `|alpha| > 0.25 sqrt(D)` or `r > 0.25 ln D`.
    pub fn leakage_warning(&self, cutoff: usize) -> Option<String> {
        let d = cutoff as f64;
        match *self {
            Gate::Displacement { mode, alpha } if alpha.norm() > 0.25 * d.sqrt() => Some(format!(
                "displacement |alpha| = {:.3} on mode {mode} exceeds 0.25*sqrt({cutoff}); expect truncation leakage",
                alpha.norm()
            )),
            Gate::Squeeze { mode, r, .. } if r > 0.25 * d.ln() => Some(format!(
                "squeeze r = {r:.3} on mode {mode} exceeds 0.25*ln({cutoff}); expect truncation leakage"
            )),
            _ => None,
        }
    }
}

fn finite(what: &'static str, v: f64) -> Result<(), FockError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(FockError::NonFiniteParameter(what))
    }
}

impl FockState {
    /// Applies `gate` in place. No renormalization happens.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), FockError> {
        gate.validate(self.num_modes())?;
        if let Some(msg) = gate.leakage_warning(self.cutoff()) {
            log::warn!("{msg}");
        }
        let d = self.cutoff();
        match *gate {
            Gate::Rotation { mode, phi } => apply_diagonal(self, mode, &rotation_phases(phi, d)),
            Gate::Kerr { mode, kappa } => apply_diagonal(self, mode, &kerr_phases(kappa, d)),
            Gate::Displacement { mode, alpha } => {
                apply_mode_matrix(self, mode, &displacement_matrix(alpha, d))
            }
            Gate::Squeeze { mode, r, phi } => {
                apply_mode_matrix(self, mode, &squeeze_matrix(r, phi, d))
            }
            Gate::Beamsplitter {
                mode_a,
                mode_b,
                theta,
                phi,
            } => apply_beamsplitter_blocks(self, mode_a, mode_b, &BeamsplitterBlocks::new(theta, phi, d)),
        }
        Ok(())
    }

    pub fn rotate(&mut self, mode: usize, phi: f64) -> Result<(), FockError> {
        self.apply(&Gate::Rotation { mode, phi })
    }

    pub fn kerr(&mut self, mode: usize, kappa: f64) -> Result<(), FockError> {
        self.apply(&Gate::Kerr { mode, kappa })
    }

    pub fn displace(&mut self, mode: usize, alpha: Complex64) -> Result<(), FockError> {
        self.apply(&Gate::Displacement { mode, alpha })
    }

    pub fn squeeze(&mut self, mode: usize, r: f64, phi: f64) -> Result<(), FockError> {
        self.apply(&Gate::Squeeze { mode, r, phi })
    }

    pub fn beamsplit(
        &mut self,
        mode_a: usize,
        mode_b: usize,
        theta: f64,
        phi: f64,
    ) -> Result<(), FockError> {
        self.apply(&Gate::Beamsplitter {
            mode_a,
            mode_b,
            theta,
            phi,
        })
    }
}

pub fn apply_rotation(state: &FockState, mode: usize, phi: f64) -> Result<FockState, FockError> {
    let mut out = state.clone();
    out.rotate(mode, phi)?;
    Ok(out)
}

pub fn apply_kerr(state: &FockState, mode: usize, kappa: f64) -> Result<FockState, FockError> {
    let mut out = state.clone();
    out.kerr(mode, kappa)?;
    Ok(out)
}

pub fn apply_displacement(
    state: &FockState,
    mode: usize,
    alpha: Complex64,
) -> Result<FockState, FockError> {
    let mut out = state.clone();
    out.displace(mode, alpha)?;
    Ok(out)
}

pub fn apply_squeeze(state: &FockState, mode: usize, r: f64, phi: f64) -> Result<FockState, FockError> {
    let mut out = state.clone();
    out.squeeze(mode, r, phi)?;
    Ok(out)
}

pub fn apply_beamsplitter(
    state: &FockState,
    mode_a: usize,
    mode_b: usize,
    theta: f64,
    phi: f64,
) -> Result<FockState, FockError> {
    let mut out = state.clone();
    out.beamsplit(mode_a, mode_b, theta, phi)?;
    Ok(out)
}

// The kernels below assume validated modes and matching cutoffs.

/// Multiplies the amplitude with occupation `n` on `mode` by `phases[n]`.
pub(crate) fn apply_diagonal(state: &mut FockState, mode: usize, phases: &[Complex64]) {
    let d = state.cutoff();
    let stride = state.stride(mode);
    for chunk in state.amplitudes_mut().chunks_exact_mut(stride * d) {
        for (level, run) in chunk.chunks_exact_mut(stride).enumerate() {
            let phase = phases[level];
            for amp in run {
                *amp *= phase;
            }
        }
    }
}

/// Contracts a `D x D` operator with one tensor leg of the state.
pub(crate) fn apply_mode_matrix(state: &mut FockState, mode: usize, matrix: &ModeMatrix) {
    let d = state.cutoff();
    debug_assert_eq!(matrix.dim(), d);
    let stride = state.stride(mode);
    let block = stride * d;
    let m = matrix.data();
    let mut scratch = vec![Complex64::new(0.0, 0.0); block];
    for chunk in state.amplitudes_mut().chunks_exact_mut(block) {
        scratch.copy_from_slice(chunk);
        if stride == 1 {
            for (out, row) in chunk.iter_mut().zip(m.chunks_exact(d)) {
                *out = row.iter().zip(&scratch).map(|(a, b)| a * b).sum();
            }
            continue;
        }
        for (out_run, row) in chunk.chunks_exact_mut(stride).zip(m.chunks_exact(d)) {
            out_run.fill(Complex64::new(0.0, 0.0));
            for (&mij, in_run) in row.iter().zip(scratch.chunks_exact(stride)) {
                // squeeze matrices are half zeros
                if mij.re == 0.0 && mij.im == 0.0 {
                    continue;
                }
                for (o, &x) in out_run.iter_mut().zip(in_run) {
                    *o += mij * x;
                }
            }
        }
    }
}

/// Index bookkeeping for a two-mode block operator on a given state shape.
#[derive(Debug, Clone)]
pub(crate) struct PairLayout {
    /// Flat indices whose occupations of both modes are zero.
    bases: Vec<usize>,
    /// Per block, per level `k_min + i`: offset of `|k, total-k>` from a base.
    offsets: Vec<usize>,
}

impl PairLayout {
    pub(crate) fn new(num_modes: usize, cutoff: usize, mode_a: usize, mode_b: usize) -> Self {
        let others: Vec<usize> = (0..num_modes).filter(|&m| m != mode_a && m != mode_b).collect();
        let count = cutoff.pow(others.len() as u32);
        let strides: Vec<usize> = others.iter().map(|&m| cutoff.pow(m as u32)).collect();
        let bases = (0..count)
            .map(|mut k| {
                let mut idx = 0;
                for s in &strides {
                    idx += (k % cutoff) * s;
                    k /= cutoff;
                }
                idx
            })
            .collect();
        let sa = cutoff.pow(mode_a as u32);
        let sb = cutoff.pow(mode_b as u32);
        let mut offsets = Vec::with_capacity(cutoff * cutoff);
        for total in 0..=2 * (cutoff - 1) {
            let k_min = total.saturating_sub(cutoff - 1);
            let k_max = total.min(cutoff - 1);
            offsets.extend((k_min..=k_max).map(|k| k * sa + (total - k) * sb));
        }
        Self { bases, offsets }
    }

    pub(crate) fn bases(&self) -> &[usize] {
        &self.bases
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}

/// Applies a block-diagonal two-mode operator; amplitudes are grouped by
/// `n_a + n_b` with all other modes fixed.
pub(crate) fn apply_beamsplitter_blocks(
    state: &mut FockState,
    mode_a: usize,
    mode_b: usize,
    blocks: &BeamsplitterBlocks,
) {
    let layout = PairLayout::new(state.num_modes(), state.cutoff(), mode_a, mode_b);
    apply_beamsplitter_layout(state, blocks, &layout);
}

pub(crate) fn apply_beamsplitter_layout(
    state: &mut FockState,
    blocks: &BeamsplitterBlocks,
    layout: &PairLayout,
) {
    let amps = state.amplitudes_mut();
    let mut gathered = vec![Complex64::new(0.0, 0.0); blocks.cutoff()];
    for &base in &layout.bases {
        let mut offs = &layout.offsets[..];
        for block in blocks.blocks() {
            let size = block.size;
            let (here, rest) = offs.split_at(size);
            offs = rest;
            if size == 1 {
                amps[base + here[0]] *= block.data[0];
                continue;
            }
            for (g, &o) in gathered.iter_mut().zip(here) {
                *g = amps[base + o];
            }
            for (row, &o) in block.data.chunks_exact(size).zip(here) {
                amps[base + o] = row.iter().zip(&gathered[..size]).map(|(a, b)| a * b).sum();
            }
        }
    }
}

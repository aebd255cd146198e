//! CV neural-network layers: interferometer, squeezers, interferometer,
//! displacements, Kerr nonlinearities.
//!
//! A layer on `N` modes carries `2 (N(N-1) + N) + 5N` real parameters. The
//! flat [`ParamVector`] concatenates layers; within a layer the order is
//!
//! ```text
//! u1.bs_thetas  [N(N-1)/2]
//! u1.bs_phis    [N(N-1)/2]
//! u1.rotations  [N]
//! squeeze_r     [N]
//! squeeze_phi   [N]
//! u2.bs_thetas  [N(N-1)/2]
//! u2.bs_phis    [N(N-1)/2]
//! u2.rotations  [N]
//! disp_re       [N]
//! disp_im       [N]
//! kerr_kappa    [N]
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{
    apply_beamsplitter_layout, apply_diagonal, apply_mode_matrix, displacement_matrix,
    kerr_phases, rotation_phases, squeeze_matrix, BeamsplitterBlocks, FockBatch, FockError, FockState,
    ModeMatrix, PairLayout,
};

/// Bumped whenever the flat parameter order changes.
pub const LAYOUT_VERSION: u32 = 1;

/// Default standard deviation for energy-injecting parameters.
pub const DEFAULT_INIT_SCALE: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CvnnError {
    #[error("{what}: expected {expected} values, found {found}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("parameter {index} is not finite")]
    NonFinite { index: usize },
    #[error("parameters are for {expected} modes but the state has {found}")]
    ModeMismatch { expected: usize, found: usize },
    #[error("layout version {found} is not supported (expected {LAYOUT_VERSION})")]
    LayoutVersion { found: u32 },
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Beamsplitter positions of the rectangular mesh: adjacent pairs
/// `(0,1), (1,2), ..., (N-2,N-1)` repeated until `N(N-1)/2` are placed.
pub fn mesh_pairs(num_modes: usize) -> Vec<(usize, usize)> {
    let count = num_modes * num_modes.saturating_sub(1) / 2;
    let adjacent = num_modes.saturating_sub(1);
    (0..count).map(|k| (k % adjacent, k % adjacent + 1)).collect()
}

/// Parameters of one interferometer; see [`mesh_pairs`] for the layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferometerParams {
    pub bs_thetas: Vec<f64>,
    pub bs_phis: Vec<f64>,
    pub final_rotations: Vec<f64>,
}

impl InterferometerParams {
    pub fn zeros(num_modes: usize) -> Self {
        let bs = num_modes * num_modes.saturating_sub(1) / 2;
        Self {
            bs_thetas: vec![0.0; bs],
            bs_phis: vec![0.0; bs],
            final_rotations: vec![0.0; num_modes],
        }
    }

    pub fn param_count(num_modes: usize) -> usize {
        num_modes * num_modes.saturating_sub(1) + num_modes
    }

    pub fn num_modes(&self) -> usize {
        self.final_rotations.len()
    }

    fn check(&self, num_modes: usize) -> Result<(), CvnnError> {
        let bs = num_modes * num_modes.saturating_sub(1) / 2;
        size("beamsplitter angles", bs, self.bs_thetas.len())?;
        size("beamsplitter phases", bs, self.bs_phis.len())?;
        size("interferometer rotations", num_modes, self.final_rotations.len())
    }

    fn push_into(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.bs_thetas);
        out.extend_from_slice(&self.bs_phis);
        out.extend_from_slice(&self.final_rotations);
    }

    fn take_from(num_modes: usize, values: &mut &[f64]) -> Self {
        let bs = num_modes * num_modes.saturating_sub(1) / 2;
        Self {
            bs_thetas: take(values, bs),
            bs_phis: take(values, bs),
            final_rotations: take(values, num_modes),
        }
    }
}

/// Parameters of one CVNN layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub u1: InterferometerParams,
    pub squeeze_r: Vec<f64>,
    pub squeeze_phi: Vec<f64>,
    pub u2: InterferometerParams,
    pub disp_re: Vec<f64>,
    pub disp_im: Vec<f64>,
    pub kerr_kappa: Vec<f64>,
}

impl LayerParams {
    pub fn zeros(num_modes: usize) -> Self {
        Self {
            u1: InterferometerParams::zeros(num_modes),
            squeeze_r: vec![0.0; num_modes],
            squeeze_phi: vec![0.0; num_modes],
            u2: InterferometerParams::zeros(num_modes),
            disp_re: vec![0.0; num_modes],
            disp_im: vec![0.0; num_modes],
            kerr_kappa: vec![0.0; num_modes],
        }
    }

    pub fn param_count(num_modes: usize) -> usize {
        2 * InterferometerParams::param_count(num_modes) + 5 * num_modes
    }

    pub fn num_modes(&self) -> usize {
        self.squeeze_r.len()
    }

    fn check(&self, num_modes: usize) -> Result<(), CvnnError> {
        self.u1.check(num_modes)?;
        self.u2.check(num_modes)?;
        size("squeeze magnitudes", num_modes, self.squeeze_r.len())?;
        size("squeeze phases", num_modes, self.squeeze_phi.len())?;
        size("displacements (real)", num_modes, self.disp_re.len())?;
        size("displacements (imag)", num_modes, self.disp_im.len())?;
        size("Kerr strengths", num_modes, self.kerr_kappa.len())?;
        if let Some(index) = self.to_flat().iter().position(|v| !v.is_finite()) {
            return Err(CvnnError::NonFinite { index });
        }
        Ok(())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(Self::param_count(self.num_modes()));
        self.u1.push_into(&mut out);
        out.extend_from_slice(&self.squeeze_r);
        out.extend_from_slice(&self.squeeze_phi);
        self.u2.push_into(&mut out);
        out.extend_from_slice(&self.disp_re);
        out.extend_from_slice(&self.disp_im);
        out.extend_from_slice(&self.kerr_kappa);
        out
    }

    pub fn from_flat(num_modes: usize, values: &[f64]) -> Result<Self, CvnnError> {
        size("layer parameters", Self::param_count(num_modes), values.len())?;
        let mut rest = values;
        let n = num_modes;
        Ok(Self {
            u1: InterferometerParams::take_from(n, &mut rest),
            squeeze_r: take(&mut rest, n),
            squeeze_phi: take(&mut rest, n),
            u2: InterferometerParams::take_from(n, &mut rest),
            disp_re: take(&mut rest, n),
            disp_im: take(&mut rest, n),
            kerr_kappa: take(&mut rest, n),
        })
    }
}

fn take(values: &mut &[f64], n: usize) -> Vec<f64> {
    let (head, tail) = values.split_at(n);
    *values = tail;
    head.to_vec()
}

fn size(what: &'static str, expected: usize, found: usize) -> Result<(), CvnnError> {
    if expected == found {
        Ok(())
    } else {
        Err(CvnnError::SizeMismatch {
            what,
            expected,
            found,
        })
    }
}

/// `d_g * (2 (N(N-1) + N) + 5N)`.
pub fn param_count(num_modes: usize, depth: usize) -> usize {
    depth * LayerParams::param_count(num_modes)
}

/// Flat parameters of a stack of `depth` layers on `num_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    num_modes: usize,
    depth: usize,
    values: Vec<f64>,
}

impl ParamVector {
    pub fn zeros(num_modes: usize, depth: usize) -> Self {
        Self {
            num_modes,
            depth,
            values: vec![0.0; param_count(num_modes, depth)],
        }
    }

    pub fn from_values(num_modes: usize, depth: usize, values: Vec<f64>) -> Result<Self, CvnnError> {
        size("parameter vector", param_count(num_modes, depth), values.len())?;
        Ok(Self {
            num_modes,
            depth,
            values,
        })
    }

    pub fn pack(layers: &[LayerParams]) -> Result<Self, CvnnError> {
        let num_modes = layers.first().map_or(1, LayerParams::num_modes);
        let mut values = Vec::with_capacity(param_count(num_modes, layers.len()));
        for layer in layers {
            layer.check(num_modes)?;
            values.extend(layer.to_flat());
        }
        Ok(Self {
            num_modes,
            depth: layers.len(),
            values,
        })
    }

    pub fn unpack(&self) -> Vec<LayerParams> {
        (0..self.depth)
            .map(|l| LayerParams::from_flat(self.num_modes, self.layer_slice(l)).expect("sized by construction"))
            .collect()
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn layer_slice(&self, layer: usize) -> &[f64] {
        let per = LayerParams::param_count(self.num_modes);
        &self.values[layer * per..(layer + 1) * per]
    }

    /// Layer index owning flat coordinate `index`.
    pub fn layer_of(&self, index: usize) -> usize {
        index / LayerParams::param_count(self.num_modes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ParamFile {
            header: ParamHeader {
                num_modes: self.num_modes,
                depth: self.depth,
                layout_version: LAYOUT_VERSION,
            },
            values: self.values.clone(),
        })
        .expect("parameters serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ParamFileError> {
        let file: ParamFile = serde_json::from_str(text)?;
        file.try_into().map_err(ParamFileError::Layout)
    }
}

/// Metadata header of a serialized parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamHeader {
    #[serde(rename = "N")]
    pub num_modes: usize,
    #[serde(rename = "d_g")]
    pub depth: usize,
    pub layout_version: u32,
}

/// On-disk form: `{"header": {"N", "d_g", "layout_version"}, "values": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamFile {
    pub header: ParamHeader,
    pub values: Vec<f64>,
}

impl From<&ParamVector> for ParamFile {
    fn from(p: &ParamVector) -> Self {
        ParamFile {
            header: ParamHeader {
                num_modes: p.num_modes,
                depth: p.depth,
                layout_version: LAYOUT_VERSION,
            },
            values: p.values.clone(),
        }
    }
}

impl TryFrom<ParamFile> for ParamVector {
    type Error = CvnnError;

    fn try_from(file: ParamFile) -> Result<Self, CvnnError> {
        if file.header.layout_version != LAYOUT_VERSION {
            return Err(CvnnError::LayoutVersion {
                found: file.header.layout_version,
            });
        }
        ParamVector::from_values(file.header.num_modes, file.header.depth, file.values)
    }
}

#[derive(Debug, Error)]
pub enum ParamFileError {
    #[error("malformed parameter file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Layout(CvnnError),
}

/// Seeded initialization: angles uniform in `(-pi, pi)`, squeeze magnitudes,
/// displacement components and Kerr strengths `Normal(0, scale)`.
pub fn init_params(num_modes: usize, depth: usize, seed: u64, scale: f64) -> ParamVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    init_params_with(num_modes, depth, scale, &mut rng)
}

pub fn init_params_with<R: Rng>(num_modes: usize, depth: usize, scale: f64, rng: &mut R) -> ParamVector {
    let normal = Normal::new(0.0, scale).expect("scale must be finite and non-negative");
    let n = num_modes;
    let bs = n * n.saturating_sub(1) / 2;
    let mut values = Vec::with_capacity(param_count(n, depth));
    for _ in 0..depth {
        // u1
        push_angles(rng, 2 * bs + n, &mut values);
        // squeeze r, then phi
        values.extend((0..n).map(|_| normal.sample(rng)));
        push_angles(rng, n, &mut values);
        // u2
        push_angles(rng, 2 * bs + n, &mut values);
        // displacement re/im, Kerr
        values.extend((0..3 * n).map(|_| normal.sample(rng)));
    }
    ParamVector {
        num_modes,
        depth,
        values,
    }
}

fn push_angles<R: Rng>(rng: &mut R, count: usize, out: &mut Vec<f64>) {
    out.extend((0..count).map(|_| rng.random_range(-PI..PI)));
}

enum Stage {
    Beamsplitter(BeamsplitterBlocks, PairLayout),
    Diagonal(usize, Vec<num_complex::Complex64>),
    Dense(usize, ModeMatrix),
}

/// A layer with every gate matrix precomputed for a fixed cutoff.
pub struct CompiledLayer {
    num_modes: usize,
    cutoff: usize,
    stages: Vec<Stage>,
}

impl CompiledLayer {
    pub fn new(params: &LayerParams, cutoff: usize) -> Result<Self, CvnnError> {
        let n = params.num_modes();
        params.check(n)?;
        // Diagonal gates are folded into the neighbouring single-mode matrix:
        // per mode, S R1 after the first mesh and K D R2 after the second.
        let mut stages = Vec::with_capacity(2 * mesh_pairs(n).len() + 2 * n);
        compile_mesh(&params.u1, cutoff, &mut stages);
        for m in 0..n {
            let rot = rotation_phases(params.u1.final_rotations[m], cutoff);
            // S(-r, phi) = S(r, phi + pi)
            let (r, phi) = signed_squeeze(params.squeeze_r[m], params.squeeze_phi[m]);
            if r != 0.0 {
                stages.push(Stage::Dense(m, squeeze_matrix(r, phi, cutoff).scale_columns(&rot)));
            } else if params.u1.final_rotations[m] != 0.0 {
                stages.push(Stage::Diagonal(m, rot));
            }
        }
        compile_mesh(&params.u2, cutoff, &mut stages);
        for m in 0..n {
            let rot = rotation_phases(params.u2.final_rotations[m], cutoff);
            let kerr = kerr_phases(params.kerr_kappa[m], cutoff);
            let alpha = Complex64::new(params.disp_re[m], params.disp_im[m]);
            if alpha != Complex64::new(0.0, 0.0) {
                let mat = displacement_matrix(alpha, cutoff).scale_columns(&rot).scale_rows(&kerr);
                stages.push(Stage::Dense(m, mat));
            } else if params.u2.final_rotations[m] != 0.0 || params.kerr_kappa[m] != 0.0 {
                stages.push(Stage::Diagonal(m, rot.iter().zip(&kerr).map(|(a, b)| a * b).collect()));
            }
        }
        Ok(Self {
            num_modes: n,
            cutoff,
            stages,
        })
    }

    pub fn from_flat(num_modes: usize, values: &[f64], cutoff: usize) -> Result<Self, CvnnError> {
        Self::new(&LayerParams::from_flat(num_modes, values)?, cutoff)
    }

    pub fn apply_batch(&self, batch: &mut FockBatch) -> Result<(), CvnnError> {
        self.check_shape(batch.num_modes(), batch.cutoff())?;
        for stage in &self.stages {
            match stage {
                Stage::Beamsplitter(blocks, layout) => batch.apply_pair_blocks(blocks, layout),
                Stage::Diagonal(m, phases) => batch.apply_diagonal(*m, phases),
                Stage::Dense(m, matrix) => batch.apply_mode_matrix(*m, matrix),
            }
        }
        Ok(())
    }

    fn check_shape(&self, num_modes: usize, cutoff: usize) -> Result<(), CvnnError> {
        if num_modes != self.num_modes {
            return Err(CvnnError::ModeMismatch {
                expected: self.num_modes,
                found: num_modes,
            });
        }
        if cutoff != self.cutoff {
            return Err(CvnnError::SizeMismatch {
                what: "cutoff",
                expected: self.cutoff,
                found: cutoff,
            });
        }
        Ok(())
    }

    pub fn apply(&self, state: &mut FockState) -> Result<(), CvnnError> {
        self.check_shape(state.num_modes(), state.cutoff())?;
        for stage in &self.stages {
            match stage {
                Stage::Beamsplitter(blocks, layout) => apply_beamsplitter_layout(state, blocks, layout),
                Stage::Diagonal(m, phases) => apply_diagonal(state, *m, phases),
                Stage::Dense(m, matrix) => apply_mode_matrix(state, *m, matrix),
            }
        }
        Ok(())
    }
}

fn signed_squeeze(r: f64, phi: f64) -> (f64, f64) {
    if r < 0.0 {
        (-r, phi + PI)
    } else {
        (r, phi)
    }
}

fn compile_mesh(p: &InterferometerParams, cutoff: usize, stages: &mut Vec<Stage>) {
    for (k, (a, b)) in mesh_pairs(p.num_modes()).into_iter().enumerate() {
        if p.bs_thetas[k] != 0.0 {
            stages.push(Stage::Beamsplitter(
                BeamsplitterBlocks::new(p.bs_thetas[k], p.bs_phis[k], cutoff),
                PairLayout::new(p.num_modes(), cutoff, a, b),
            ));
        }
    }
}

/// A whole stack of compiled layers.
pub struct CompiledStack {
    layers: Vec<CompiledLayer>,
}

impl CompiledStack {
    pub fn new(params: &ParamVector, cutoff: usize) -> Result<Self, CvnnError> {
        let layers = (0..params.depth())
            .map(|l| CompiledLayer::from_flat(params.num_modes(), params.layer_slice(l), cutoff))
            .collect::<Result<_, _>>()?;
        Ok(Self { layers })
    }

    pub fn from_layers(layers: Vec<CompiledLayer>) -> Self {
        Self { layers }
    }

    pub fn layers(&self) -> &[CompiledLayer] {
        &self.layers
    }

    pub fn apply(&self, state: &mut FockState) -> Result<(), CvnnError> {
        self.apply_from(0, state)
    }

    pub fn apply_batch(&self, batch: &mut FockBatch) -> Result<(), CvnnError> {
        self.apply_batch_from(0, batch)
    }

    pub fn apply_batch_from(&self, first: usize, batch: &mut FockBatch) -> Result<(), CvnnError> {
        for layer in &self.layers[first..] {
            layer.apply_batch(batch)?;
        }
        Ok(())
    }

    /// Applies layers `first..` only.
    pub fn apply_from(&self, first: usize, state: &mut FockState) -> Result<(), CvnnError> {
        for layer in &self.layers[first..] {
            layer.apply(state)?;
        }
        Ok(())
    }
}

fn check_modes(expected: usize, state: &FockState) -> Result<(), CvnnError> {
    if state.num_modes() == expected {
        Ok(())
    } else {
        Err(CvnnError::ModeMismatch {
            expected,
            found: state.num_modes(),
        })
    }
}

/// Rectangular beamsplitter mesh followed by one rotation per mode.
pub fn apply_interferometer(state: &FockState, p: &InterferometerParams) -> Result<FockState, CvnnError> {
    let n = state.num_modes();
    p.check(n)?;
    let mut out = state.clone();
    for (k, (a, b)) in mesh_pairs(n).into_iter().enumerate() {
        out.beamsplit(a, b, p.bs_thetas[k], p.bs_phis[k])?;
    }
    for (m, &phi) in p.final_rotations.iter().enumerate() {
        out.rotate(m, phi)?;
    }
    Ok(out)
}

/// `Kerr . D . U2 . S . U1` applied to `state`.
pub fn apply_layer(state: &FockState, p: &LayerParams) -> Result<FockState, CvnnError> {
    check_modes(p.num_modes(), state)?;
    let layer = CompiledLayer::new(p, state.cutoff())?;
    let mut out = state.clone();
    layer.apply(&mut out)?;
    Ok(out)
}

/// All layers of `params` in order.
pub fn apply_layers(state: &FockState, params: &ParamVector) -> Result<FockState, CvnnError> {
    check_modes(params.num_modes(), state)?;
    let stack = CompiledStack::new(params, state.cutoff())?;
    let mut out = state.clone();
    stack.apply(&mut out)?;
    Ok(out)
}

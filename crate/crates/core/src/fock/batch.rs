use num_complex::Complex64;

use super::gates::PairLayout;
use super::matrices::{BeamsplitterBlocks, ModeMatrix};
use super::{FockError, FockState};

/// Many states of identical shape evolved through the same gates.
///
/// Amplitudes are split into real and imaginary planes with the batch index
/// fastest: entry `(index, b)` lives at `index * len + b`. Every kernel then
/// runs its innermost loop over samples, which keeps it branch-free and
/// vectorizable.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBatch {
    num_modes: usize,
    cutoff: usize,
    len: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl FockBatch {
    pub fn from_states(states: &[FockState]) -> Result<Self, FockError> {
        let first = states.first().ok_or(FockError::EmptyBatch)?;
        let (num_modes, cutoff, dim) = (first.num_modes(), first.cutoff(), first.dim());
        let len = states.len();
        let mut re = vec![0.0; dim * len];
        let mut im = vec![0.0; dim * len];
        for (b, s) in states.iter().enumerate() {
            if s.num_modes() != num_modes || s.cutoff() != cutoff {
                return Err(FockError::AmplitudeLength {
                    expected: dim,
                    found: s.dim(),
                });
            }
            for (idx, a) in s.amplitudes().iter().enumerate() {
                re[idx * len + b] = a.re;
                im[idx * len + b] = a.im;
            }
        }
        Ok(Self {
            num_modes,
            cutoff,
            len,
            re,
            im,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.re.len() / self.len
    }

    fn stride(&self, mode: usize) -> usize {
        self.cutoff.pow(mode as u32)
    }

    pub fn state(&self, b: usize) -> FockState {
        let amps = (0..self.dim())
            .map(|idx| Complex64::new(self.re[idx * self.len + b], self.im[idx * self.len + b]))
            .collect();
        FockState::from_amplitudes(self.num_modes, self.cutoff, amps).expect("shape is consistent")
    }

    pub fn states(&self) -> Vec<FockState> {
        (0..self.len).map(|b| self.state(b)).collect()
    }

    pub fn norms_sqr(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        for (re, im) in self.re.chunks_exact(self.len).zip(self.im.chunks_exact(self.len)) {
            for ((o, r), i) in out.iter_mut().zip(re).zip(im) {
                *o += r * r + i * i;
            }
        }
        out
    }

    /// Per-sample `<x>` on `mode` (`hbar = 2`), each renormalized.
    pub fn expectation_x(&self, mode: usize) -> Result<Vec<f64>, FockError> {
        if mode >= self.num_modes {
            return Err(FockError::ModeOutOfRange {
                mode,
                num_modes: self.num_modes,
            });
        }
        let n = self.len;
        let d = self.cutoff;
        let stride = self.stride(mode);
        let mut acc = vec![0.0; n];
        for chunk in 0..self.dim() / (stride * d) {
            for level in 0..d - 1 {
                let w = ((level + 1) as f64).sqrt();
                let lo = (chunk * stride * d + level * stride) * n;
                let hi = lo + stride * n;
                let (re0, im0) = (&self.re[lo..lo + stride * n], &self.im[lo..lo + stride * n]);
                let (re1, im1) = (&self.re[hi..hi + stride * n], &self.im[hi..hi + stride * n]);
                for (k, ((r0, i0), (r1, i1))) in re0.iter().zip(im0).zip(re1.iter().zip(im1)).enumerate() {
                    // Re(conj(psi_n) psi_{n+1})
                    acc[k % n] += w * (r0 * r1 + i0 * i1);
                }
            }
        }
        let norms = self.norms_sqr();
        acc.iter()
            .zip(&norms)
            .map(|(a, &ns)| {
                if ns == 0.0 || !ns.is_finite() {
                    Err(FockError::ZeroNorm)
                } else {
                    Ok(2.0 * a / ns)
                }
            })
            .collect()
    }

    pub(crate) fn apply_diagonal(&mut self, mode: usize, phases: &[Complex64]) {
        let n = self.len;
        let d = self.cutoff;
        let run = self.stride(mode) * n;
        for (chunk_re, chunk_im) in self.re.chunks_exact_mut(run * d).zip(self.im.chunks_exact_mut(run * d)) {
            for ((re, im), p) in chunk_re.chunks_exact_mut(run).zip(chunk_im.chunks_exact_mut(run)).zip(phases) {
                for (r, i) in re.iter_mut().zip(im.iter_mut()) {
                    let (a, b) = (*r, *i);
                    *r = p.re * a - p.im * b;
                    *i = p.re * b + p.im * a;
                }
            }
        }
    }

    pub(crate) fn apply_mode_matrix(&mut self, mode: usize, matrix: &ModeMatrix) {
        let d = self.cutoff;
        let run = self.stride(mode) * self.len;
        let mut starts: Vec<usize> = (0..d).map(|i| i * run).collect();
        let mut scratch = Scratch::new(d);
        for chunk in 0..self.re.len() / (run * d) {
            for (i, s) in starts.iter_mut().enumerate() {
                *s = (chunk * d + i) * run;
            }
            matvec_in_place(&mut self.re, &mut self.im, &starts, matrix.data(), run, &mut scratch);
        }
    }

    pub(crate) fn apply_pair_blocks(&mut self, blocks: &BeamsplitterBlocks, layout: &PairLayout) {
        let n = self.len;
        let mut starts = Vec::with_capacity(self.cutoff);
        let mut scratch = Scratch::new(self.cutoff);
        for &base in layout.bases() {
            let mut offs = layout.offsets();
            for block in blocks.blocks() {
                let (here, rest) = offs.split_at(block.size);
                offs = rest;
                starts.clear();
                starts.extend(here.iter().map(|&o| (base + o) * n));
                matvec_in_place(&mut self.re, &mut self.im, &starts, &block.data, n, &mut scratch);
            }
        }
    }
}

const LANES: usize = 4;
const ROWS: usize = 4;

/// Inputs of one lane chunk, copied out so outputs can overwrite them.
struct Scratch {
    re: Vec<[f64; LANES]>,
    im: Vec<[f64; LANES]>,
}

impl Scratch {
    fn new(rows: usize) -> Self {
        Self {
            re: vec![[0.0; LANES]; rows],
            im: vec![[0.0; LANES]; rows],
        }
    }
}

/// `v_i <- sum_j m[i][j] v_j` where `v_i` is the run of `run` lanes starting at
/// `starts[i]` and `m` is row-major `s x s` with `s = starts.len()`.
///
/// Works on `LANES` lanes at a time with `ROWS` output rows held in registers.
#[inline(always)]
fn matvec_in_place(re: &mut [f64], im: &mut [f64], starts: &[usize], m: &[Complex64], run: usize, scratch: &mut Scratch) {
    let s = starts.len();
    let (xr, xi) = (&mut scratch.re[..s], &mut scratch.im[..s]);
    let mut k = 0;
    while k + LANES <= run {
        for ((r, i), &st) in xr.iter_mut().zip(xi.iter_mut()).zip(starts) {
            r.copy_from_slice(&re[st + k..st + k + LANES]);
            i.copy_from_slice(&im[st + k..st + k + LANES]);
        }
        let mut row = 0;
        while row + ROWS <= s {
            let mut ar = [[0.0; LANES]; ROWS];
            let mut ai = [[0.0; LANES]; ROWS];
            for (j, (xrj, xij)) in xr.iter().zip(xi.iter()).enumerate() {
                for t in 0..ROWS {
                    let c = m[(row + t) * s + j];
                    for l in 0..LANES {
                        ar[t][l] += c.re * xrj[l] - c.im * xij[l];
                        ai[t][l] += c.re * xij[l] + c.im * xrj[l];
                    }
                }
            }
            for t in 0..ROWS {
                let st = starts[row + t] + k;
                re[st..st + LANES].copy_from_slice(&ar[t]);
                im[st..st + LANES].copy_from_slice(&ai[t]);
            }
            row += ROWS;
        }
        for row in row..s {
            let mut ar = [0.0; LANES];
            let mut ai = [0.0; LANES];
            for (j, (xrj, xij)) in xr.iter().zip(xi.iter()).enumerate() {
                let c = m[row * s + j];
                for l in 0..LANES {
                    ar[l] += c.re * xrj[l] - c.im * xij[l];
                    ai[l] += c.re * xij[l] + c.im * xrj[l];
                }
            }
            let st = starts[row] + k;
            re[st..st + LANES].copy_from_slice(&ar);
            im[st..st + LANES].copy_from_slice(&ai);
        }
        k += LANES;
    }
    // lanes left over when `run` is not a multiple of LANES
    for k in k..run {
        let x: Vec<Complex64> = starts.iter().map(|&st| Complex64::new(re[st + k], im[st + k])).collect();
        for (row, &st) in starts.iter().enumerate() {
            let v: Complex64 = m[row * s..(row + 1) * s].iter().zip(&x).map(|(c, x)| c * x).sum();
            re[st + k] = v.re;
            im[st + k] = v.im;
        }
    }
}

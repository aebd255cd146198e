use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FockError;

/// Largest amplitude vector `vacuum` will allocate unless told otherwise
/// (2^24 amplitudes, 256 MiB).
pub const DEFAULT_AMPLITUDE_BUDGET: usize = 1 << 24;

/// Pure state of `num_modes` bosonic modes, each truncated to Fock levels
/// `0..cutoff`.
///
/// Amplitudes are stored densely. The joint index of the basis state
/// `|n_0, n_1, ..., n_{N-1}>` is the little-endian mixed-radix number
/// `n_0 + n_1*D + n_2*D^2 + ...`, so mode 0 has stride 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    num_modes: usize,
    cutoff: usize,
    amplitudes: Vec<Complex64>,
}

impl FockState {
    /// `|0>^N` with the default memory budget.
    pub fn vacuum(num_modes: usize, cutoff: usize) -> Result<Self, FockError> {
        Self::vacuum_with_budget(num_modes, cutoff, DEFAULT_AMPLITUDE_BUDGET)
    }

    pub fn vacuum_with_budget(
        num_modes: usize,
        cutoff: usize,
        budget: usize,
    ) -> Result<Self, FockError> {
        let dim = checked_dimension(num_modes, cutoff, budget)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_modes,
            cutoff,
            amplitudes,
        })
    }

    /// Builds a state from explicit amplitudes. No normalization is applied.
    pub fn from_amplitudes(
        num_modes: usize,
        cutoff: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, FockError> {
        let dim = checked_dimension(num_modes, cutoff, usize::MAX)?;
        if amplitudes.len() != dim {
            return Err(FockError::AmplitudeLength {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            num_modes,
            cutoff,
            amplitudes,
        })
    }

    /// Single-mode number state `|n>`.
    pub fn number_state(cutoff: usize, n: usize) -> Result<Self, FockError> {
        Self::product_number_state(cutoff, &[n])
    }

    /// Product of number states, one occupation per mode.
    pub fn product_number_state(cutoff: usize, occupations: &[usize]) -> Result<Self, FockError> {
        let mut state = Self::vacuum(occupations.len(), cutoff)?;
        if let Some(&n) = occupations.iter().find(|&&n| n >= cutoff) {
            return Err(FockError::LevelOutOfRange { level: n, cutoff });
        }
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        let idx = state.encode(occupations);
        state.amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Total Hilbert-space dimension `D^N`.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Joint index of the basis state with the given per-mode occupations.
    pub fn encode(&self, occupations: &[usize]) -> usize {
        debug_assert_eq!(occupations.len(), self.num_modes);
        occupations
            .iter()
            .rev()
            .fold(0, |acc, &n| acc * self.cutoff + n)
    }

    /// Per-mode occupations of a joint index.
    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_modes);
        for _ in 0..self.num_modes {
            out.push(index % self.cutoff);
            index /= self.cutoff;
        }
        out
    }

    /// Distance between consecutive Fock levels of `mode` in the flat vector.
    pub fn stride(&self, mode: usize) -> usize {
        self.cutoff.pow(mode as u32)
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<(), FockError> {
        if mode >= self.num_modes {
            Err(FockError::ModeOutOfRange {
                mode,
                num_modes: self.num_modes,
            })
        } else {
            Ok(())
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Euclidean norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn renormalize(&mut self) -> Result<(), FockError> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(FockError::ZeroNorm);
        }
        let inv = 1.0 / n;
        for a in &mut self.amplitudes {
            *a *= inv;
        }
        Ok(())
    }

    /// Copy scaled to unit norm.
    pub fn renormalized(&self) -> Result<Self, FockError> {
        let mut s = self.clone();
        s.renormalize()?;
        Ok(s)
    }

    /// `<psi|x|psi> / <psi|psi>` on `mode`, with `x = a + a^dagger` (hbar = 2).
    pub fn expectation_x(&self, mode: usize) -> Result<f64, FockError> {
        self.check_mode(mode)?;
        let norm_sqr = self.norm_sqr();
        if norm_sqr == 0.0 || !norm_sqr.is_finite() {
            return Err(FockError::ZeroNorm);
        }
        let stride = self.stride(mode);
        let d = self.cutoff;
        let sqrt_n: Vec<f64> = (0..d).map(|n| (n as f64).sqrt()).collect();
        // <a> = sum_n sqrt(n+1) conj(psi_n) psi_{n+1}
        let mut a_mean = Complex64::new(0.0, 0.0);
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let n = (idx / stride) % d;
            if n + 1 < d {
                a_mean += amp.conj() * self.amplitudes[idx + stride] * sqrt_n[n + 1];
            }
        }
        Ok(2.0 * a_mean.re / norm_sqr)
    }

    /// All per-mode position means in one call.
    pub fn expectation_x_all(&self) -> Result<Vec<f64>, FockError> {
        (0..self.num_modes).map(|m| self.expectation_x(m)).collect()
    }

    /// `<x^2> - <x>^2` on `mode` (normalized). `x^2` is the untruncated
    /// operator, evaluated as `||x psi||^2` with one level of headroom.
    pub fn variance_x(&self, mode: usize) -> Result<f64, FockError> {
        let mean = self.expectation_x(mode)?;
        let norm_sqr = self.norm_sqr();
        let stride = self.stride(mode);
        let d = self.cutoff;
        let outer = self.dim() / (stride * d);
        let mut second = 0.0;
        let mut column = vec![Complex64::new(0.0, 0.0); d + 1];
        for hi in 0..outer {
            for lo in 0..stride {
                let base = hi * stride * d + lo;
                // (x psi)_m = sqrt(m) psi_{m-1} + sqrt(m+1) psi_{m+1}, m in 0..=d
                for (m, c) in column.iter_mut().enumerate() {
                    let mut v = Complex64::new(0.0, 0.0);
                    if m >= 1 {
                        v += self.amplitudes[base + (m - 1) * stride] * (m as f64).sqrt();
                    }
                    if m + 1 < d {
                        v += self.amplitudes[base + (m + 1) * stride] * ((m + 1) as f64).sqrt();
                    }
                    *c = v;
                }
                second += column.iter().map(|c| c.norm_sqr()).sum::<f64>();
            }
        }
        Ok(second / norm_sqr - mean * mean)
    }

    /// Unnormalized photon-number distribution of one mode.
    pub fn photon_distribution(&self, mode: usize) -> Result<Vec<f64>, FockError> {
        self.check_mode(mode)?;
        let stride = self.stride(mode);
        let mut hist = vec![0.0; self.cutoff];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            hist[(idx / stride) % self.cutoff] += amp.norm_sqr();
        }
        Ok(hist)
    }

    /// Unnormalized distribution of the total photon number over all modes.
    pub fn total_photon_distribution(&self) -> Vec<f64> {
        let mut hist = vec![0.0; self.num_modes * (self.cutoff - 1) + 1];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let total: usize = self.decode(idx).iter().sum();
            hist[total] += amp.norm_sqr();
        }
        hist
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest entrywise difference `max |a_i - b_i|`.
    pub fn max_abs_diff(&self, other: &FockState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_dump(&self) -> StateDump {
        StateDump {
            num_modes: self.num_modes,
            cutoff: self.cutoff,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_dump()).expect("state dump serializes")
    }

    pub fn from_dump(dump: StateDump) -> Result<Self, FockError> {
        let amps = dump
            .amplitudes
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        Self::from_amplitudes(dump.num_modes, dump.cutoff, amps)
    }
}

/// JSON debug view of a state: `{num_modes, cutoff, amplitudes: [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub num_modes: usize,
    pub cutoff: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

fn checked_dimension(num_modes: usize, cutoff: usize, budget: usize) -> Result<usize, FockError> {
    if num_modes == 0 {
        return Err(FockError::NoModes);
    }
    if cutoff < 2 {
        return Err(FockError::CutoffTooSmall(cutoff));
    }
    let dim = (cutoff as u128).checked_pow(num_modes as u32);
    match dim {
        Some(d) if d <= budget as u128 => Ok(d as usize),
        _ => Err(FockError::BudgetExceeded {
            num_modes,
            cutoff,
            budget,
        }),
    }
}

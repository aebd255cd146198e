//! Fock-basis matrix elements of the Gaussian gates.
//!
//! Displacement and squeezing use the exact closed-form matrix elements,
//! generated column by column through two-index recurrences. The
//! beamsplitter is built block by block over total photon number from the
//! linear action of the gate on the creation operators.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Dense `D x D` single-mode operator, row-major: `data[m * dim + n] = <m|U|n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ModeMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[m * self.dim + n]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// `self * diag(phases)`.
    pub fn scale_columns(mut self, phases: &[Complex64]) -> Self {
        for row in self.data.chunks_exact_mut(self.dim) {
            for (v, p) in row.iter_mut().zip(phases) {
                *v *= p;
            }
        }
        self
    }

    /// `diag(phases) * self`.
    pub fn scale_rows(mut self, phases: &[Complex64]) -> Self {
        for (row, p) in self.data.chunks_exact_mut(self.dim).zip(phases) {
            for v in row {
                *v *= p;
            }
        }
        self
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &ModeMatrix) -> ModeMatrix {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        ModeMatrix { dim: d, data }
    }
}

/// `<m|D(alpha)|n>` for `m, n < cutoff`.
///
/// Column 0 holds the coherent-state coefficients; the remaining columns
/// follow from `D a^dagger = (a^dagger - conj(alpha)) D`:
/// `D[m][n] = (sqrt(m) D[m-1][n-1] - conj(alpha) D[m][n-1]) / sqrt(n)`.
pub fn displacement_matrix(alpha: Complex64, cutoff: usize) -> ModeMatrix {
    let d = cutoff;
    let sqrt: Vec<f64> = (0..d).map(|n| (n as f64).sqrt()).collect();
    let mut data = vec![ZERO; d * d];
    data[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for m in 1..d {
        data[m * d] = alpha / sqrt[m] * data[(m - 1) * d];
    }
    let alpha_conj = alpha.conj();
    for n in 1..d {
        for m in 0..d {
            let mut v = -alpha_conj * data[m * d + n - 1];
            if m > 0 {
                v += data[(m - 1) * d + n - 1] * sqrt[m];
            }
            data[m * d + n] = v / sqrt[n];
        }
    }
    ModeMatrix { dim: d, data }
}

/// `<m|S(z)|n>` with `S(z) = exp((conj(z) a^2 - z a^dagger^2) / 2)`, `z = r e^{i phi}`.
///
/// Only entries with `m + n` even are nonzero. The recurrence is
/// `S[m][n] = (sqrt(m) sech(r) S[m-1][n-1] + sqrt(n-1) e^{-i phi} tanh(r) S[m][n-2]) / sqrt(n)`.
pub fn squeeze_matrix(r: f64, phi: f64, cutoff: usize) -> ModeMatrix {
    let d = cutoff;
    let sqrt: Vec<f64> = (0..d).map(|n| (n as f64).sqrt()).collect();
    let sech = 1.0 / r.cosh();
    let tanh = r.tanh();
    let column0_ratio = -Complex64::from_polar(tanh, phi);
    let row_ratio = Complex64::from_polar(tanh, -phi);
    let mut data = vec![ZERO; d * d];
    data[0] = Complex64::new(sech.sqrt(), 0.0);
    for m in (2..d).step_by(2) {
        data[m * d] = column0_ratio * data[(m - 2) * d] * (sqrt[m - 1] / sqrt[m]);
    }
    for n in 1..d {
        for m in ((n % 2)..d).step_by(2) {
            let mut v = ZERO;
            if m > 0 {
                v += data[(m - 1) * d + n - 1] * (sqrt[m] * sech);
            }
            if n > 1 {
                v += row_ratio * data[m * d + n - 2] * sqrt[n - 1];
            }
            data[m * d + n] = v / sqrt[n];
        }
    }
    ModeMatrix { dim: d, data }
}

/// `e^{i phi n}` for `n < cutoff`.
pub fn rotation_phases(phi: f64, cutoff: usize) -> Vec<Complex64> {
    (0..cutoff)
        .map(|n| Complex64::from_polar(1.0, phi * n as f64))
        .collect()
}

/// `e^{i kappa n^2}` for `n < cutoff`.
pub fn kerr_phases(kappa: f64, cutoff: usize) -> Vec<Complex64> {
    (0..cutoff)
        .map(|n| Complex64::from_polar(1.0, kappa * (n * n) as f64))
        .collect()
}

/// One fixed-total-photon-number block of a beamsplitter, restricted to the
/// levels inside the cutoff. Basis vector `i` of the block is
/// `|k_min + i, total - k_min - i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamsplitterBlock {
    pub total: usize,
    pub k_min: usize,
    pub size: usize,
    /// Row-major `size x size`.
    pub data: Vec<Complex64>,
}

/// Block-diagonal Fock representation of
/// `BS(theta, phi) = exp(theta (e^{i phi} a^dagger b - e^{-i phi} a b^dagger))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamsplitterBlocks {
    cutoff: usize,
    blocks: Vec<BeamsplitterBlock>,
}

impl BeamsplitterBlocks {
    pub fn new(theta: f64, phi: f64, cutoff: usize) -> Self {
        let d = cutoff;
        let max_total = 2 * (d - 1);
        let (s, c) = theta.sin_cos();
        // BS a^dagger BS^dagger = c a^dagger - e^{-i phi} s b^dagger
        // BS b^dagger BS^dagger = e^{i phi} s a^dagger + c b^dagger
        let from_a = (Complex64::new(c, 0.0), -Complex64::from_polar(s, -phi));
        let from_b = (Complex64::from_polar(s, phi), Complex64::new(c, 0.0));
        let sqrt: Vec<f64> = (0..=max_total + 1).map(|n| (n as f64).sqrt()).collect();

        // prev/cur hold full blocks column-major: entry (k', k) at k * (n + 1) + k',
        // i.e. column k is BS|k, n-k> over |k', n-k'>.
        let mut prev = vec![Complex64::new(1.0, 0.0)];
        let mut cur = Vec::new();
        let mut blocks = Vec::with_capacity(max_total + 1);
        blocks.push(restrict(0, &prev, d));
        for n in 1..=max_total {
            let rows = n + 1;
            cur.clear();
            cur.resize(rows * rows, ZERO);
            for k in 0..=n {
                // |k, n-k> = a^dagger |k-1, n-k> / sqrt(k), or |0, n> = b^dagger |0, n-1> / sqrt(n)
                let (src, coeffs, inv) = if k > 0 {
                    (k - 1, from_a, 1.0 / sqrt[k])
                } else {
                    (0, from_b, 1.0 / sqrt[n])
                };
                let source = &prev[src * n..(src + 1) * n];
                let col = &mut cur[k * rows..(k + 1) * rows];
                for (kp, &amp) in source.iter().enumerate() {
                    let lp = n - 1 - kp;
                    col[kp + 1] += coeffs.0 * amp * (sqrt[kp + 1] * inv);
                    col[kp] += coeffs.1 * amp * (sqrt[lp + 1] * inv);
                }
            }
            blocks.push(restrict(n, &cur, d));
            std::mem::swap(&mut prev, &mut cur);
        }
        Self { cutoff, blocks }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn blocks(&self) -> &[BeamsplitterBlock] {
        &self.blocks
    }
}

/// Keeps the rows/columns of a full column-major block whose levels fit below the cutoff.
fn restrict(total: usize, full: &[Complex64], cutoff: usize) -> BeamsplitterBlock {
    let rows = total + 1;
    let k_min = total.saturating_sub(cutoff - 1);
    let k_max = total.min(cutoff - 1);
    let size = k_max - k_min + 1;
    let mut data = vec![ZERO; size * size];
    for i in 0..size {
        for j in 0..size {
            data[i * size + j] = full[(k_min + j) * rows + k_min + i];
        }
    }
    BeamsplitterBlock {
        total,
        k_min,
        size,
        data,
    }
}

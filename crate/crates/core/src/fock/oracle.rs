//! Independent reference routes used only by tests: Laguerre closed forms
//! and dense matrix exponentials of truncated generators.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Generalized Laguerre polynomial `L_k^{(a)}(x)` by the three-term recurrence.
pub fn laguerre(k: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 1..k {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + a - x) * cur - (j + a) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn sqrt_factorial_ratio(small: usize, large: usize) -> f64 {
    // sqrt(small! / large!)
    (small + 1..=large).map(|i| 1.0 / (i as f64).sqrt()).product()
}

/// `<m|D(alpha)|n>` from the Laguerre closed form.
pub fn displacement_element(alpha: Complex64, m: usize, n: usize) -> Complex64 {
    let x = alpha.norm_sqr();
    let gauss = (-0.5 * x).exp();
    if m >= n {
        alpha.powu((m - n) as u32) * sqrt_factorial_ratio(n, m) * gauss * laguerre(n, (m - n) as f64, x)
    } else {
        (-alpha.conj()).powu((n - m) as u32)
            * sqrt_factorial_ratio(m, n)
            * gauss
            * laguerre(m, (n - m) as f64, x)
    }
}

/// Row-major `alpha a^dagger - conj(alpha) a` on `dim` levels.
pub fn displacement_generator(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut g = vec![ZERO; dim * dim];
    for n in 0..dim - 1 {
        let s = ((n + 1) as f64).sqrt();
        g[(n + 1) * dim + n] += alpha * s;
        g[n * dim + n + 1] -= alpha.conj() * s;
    }
    g
}

/// Row-major `(conj(z) a^2 - z a^dagger^2) / 2` on `dim` levels.
pub fn squeeze_generator(z: Complex64, dim: usize) -> Vec<Complex64> {
    let mut g = vec![ZERO; dim * dim];
    for n in 0..dim.saturating_sub(2) {
        let s = (((n + 1) * (n + 2)) as f64).sqrt();
        g[(n + 2) * dim + n] -= z * s * 0.5;
        g[n * dim + n + 2] += z.conj() * s * 0.5;
    }
    g
}

/// Generator of the beamsplitter on the total-photon-number-`n` block,
/// basis `|k, n-k>`, `k = 0..=n`.
pub fn beamsplitter_block_generator(theta: f64, phi: f64, n: usize) -> Vec<Complex64> {
    let dim = n + 1;
    let mut g = vec![ZERO; dim * dim];
    for k in 0..=n {
        if k < n {
            let s = (((k + 1) * (n - k)) as f64).sqrt();
            g[(k + 1) * dim + k] += Complex64::from_polar(theta * s, phi);
        }
        if k > 0 {
            let s = ((k * (n - k + 1)) as f64).sqrt();
            g[(k - 1) * dim + k] -= Complex64::from_polar(theta * s, -phi);
        }
    }
    g
}

fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let x = a[i * dim + k];
            for j in 0..dim {
                out[i * dim + j] += x * b[k * dim + j];
            }
        }
    }
    out
}

/// Dense matrix exponential by scaling and squaring with a long Taylor series.
pub fn expm(g: &[Complex64], dim: usize) -> Vec<Complex64> {
    let norm: f64 = (0..dim)
        .map(|i| (0..dim).map(|j| g[i * dim + j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    while norm / f64::from(1u32 << squarings.min(30)) > 0.25 {
        squarings += 1;
    }
    let scale = 1.0 / f64::from(1u32 << squarings);
    let scaled: Vec<Complex64> = g.iter().map(|v| v * scale).collect();
    let mut result = vec![ZERO; dim * dim];
    let mut term = vec![ZERO; dim * dim];
    for i in 0..dim {
        result[i * dim + i] = Complex64::new(1.0, 0.0);
        term[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    for k in 1..30 {
        term = matmul(&term, &scaled, dim);
        let inv = 1.0 / k as f64;
        for v in &mut term {
            *v *= inv;
        }
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result, dim);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_low_orders() {
        let x = 0.7;
        let a = 2.0;
        assert_eq!(laguerre(0, a, x), 1.0);
        assert!((laguerre(1, a, x) - (1.0 + a - x)).abs() < 1e-15);
        let l2 = 0.5 * (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0));
        assert!((laguerre(2, a, x) - l2).abs() < 1e-14);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let t = 1.3;
        let g = vec![ZERO, Complex64::new(-t, 0.0), Complex64::new(t, 0.0), ZERO];
        let e = expm(&g, 2);
        assert!((e[0].re - t.cos()).abs() < 1e-14);
        assert!((e[2].re - t.sin()).abs() < 1e-14);
    }
}

//! Central finite-difference gradients.

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GradError {
    #[error("step must be positive and finite, got {0}")]
    Step(f64),
    #[error("non-finite loss {value} when probing coordinate {coordinate}")]
    NonFinite { coordinate: usize, value: f64 },
}

/// `(L(p + h e_k) - L(p - h e_k)) / 2h` for every coordinate `k`.
pub fn fd_gradient<F>(loss_fn: F, params: &[f64], h: f64) -> Result<Vec<f64>, GradError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fd_gradient_by(params.len(), h, |k, delta| {
        let mut p = params.to_vec();
        p[k] += delta;
        Ok::<_, GradError>(loss_fn(&p))
    })
}

/// Central differences over `n` coordinates where `eval(k, delta)` returns
/// the loss with coordinate `k` shifted by `delta`. Coordinates are probed in
/// parallel; the result does not depend on the thread count.
pub fn fd_gradient_by<E, F>(n: usize, h: f64, eval: F) -> Result<Vec<f64>, E>
where
    E: From<GradError> + Send,
    F: Fn(usize, f64) -> Result<f64, E> + Sync,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(GradError::Step(h).into());
    }
    (0..n)
        .into_par_iter()
        .map(|k| {
            let up = eval(k, h)?;
            let down = eval(k, -h)?;
            for value in [up, down] {
                if !value.is_finite() {
                    return Err(GradError::NonFinite { coordinate: k, value }.into());
                }
            }
            Ok((up - down) / (2.0 * h))
        })
        .collect()
}

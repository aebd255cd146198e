use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EngineError;

pub const LEAKY_SLOPE: f64 = 0.2;
/// Hidden widths after the input layer; the output is a single label.
pub const HIDDEN_SIZES: [usize; 2] = [16, 8];

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn leaky(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        LEAKY_SLOPE * x
    }
}

fn leaky_slope_at(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

/// Fully connected network with leaky-ReLU hidden layers and a sigmoid output.
///
/// Parameters are stored flat, layer by layer: the weight matrix (row-major,
/// `out x in`) followed by the bias vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDiscriminator {
    layer_sizes: Vec<usize>,
    params: Vec<f64>,
}

impl ClassicalDiscriminator {
    /// `input -> 16 -> 8 -> 1`.
    pub fn default_sizes(input: usize) -> Vec<usize> {
        let mut sizes = vec![input];
        sizes.extend(HIDDEN_SIZES);
        sizes.push(1);
        sizes
    }

    pub fn param_count(layer_sizes: &[usize]) -> usize {
        layer_sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn zeros(layer_sizes: &[usize]) -> Result<Self, EngineError> {
        Self::from_params(layer_sizes, vec![0.0; Self::param_count(layer_sizes)])
    }

    pub fn from_params(layer_sizes: &[usize], params: Vec<f64>) -> Result<Self, EngineError> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) || layer_sizes.last() != Some(&1) {
            return Err(EngineError::Shape {
                what: "discriminator layer sizes",
                expected: 1,
                found: layer_sizes.last().copied().unwrap_or(0),
            });
        }
        let expected = Self::param_count(layer_sizes);
        if params.len() != expected {
            return Err(EngineError::Shape {
                what: "discriminator parameters",
                expected,
                found: params.len(),
            });
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            params,
        })
    }

    /// Xavier-uniform weights, zero biases.
    pub fn init(layer_sizes: &[usize], seed: u64) -> Result<Self, EngineError> {
        Self::init_with(layer_sizes, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn init_with<R: Rng>(layer_sizes: &[usize], rng: &mut R) -> Result<Self, EngineError> {
        let mut d = Self::zeros(layer_sizes)?;
        let mut at = 0;
        for w in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for p in &mut d.params[at..at + fan_in * fan_out] {
                *p = rng.random_range(-a..a);
            }
            at += fan_in * fan_out + fan_out;
        }
        Ok(d)
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn check_input(&self, x: &[f64]) -> Result<(), EngineError> {
        if x.len() == self.input_size() {
            Ok(())
        } else {
            Err(EngineError::Shape {
                what: "discriminator input",
                expected: self.input_size(),
                found: x.len(),
            })
        }
    }

    /// Pre-activations of every layer.
    fn forward_trace(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut pre = Vec::with_capacity(self.layer_sizes.len() - 1);
        let mut act = x.to_vec();
        let mut at = 0;
        let last = self.layer_sizes.len() - 2;
        for (l, w) in self.layer_sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &self.params[at..at + n_in * n_out];
            let bias = &self.params[at + n_in * n_out..at + n_in * n_out + n_out];
            let z: Vec<f64> = weights
                .chunks_exact(n_in)
                .zip(bias)
                .map(|(row, b)| row.iter().zip(&act).map(|(w, a)| w * a).sum::<f64>() + b)
                .collect();
            if l < last {
                act = z.iter().map(|&v| leaky(v)).collect();
            }
            pre.push(z);
            at += n_in * n_out + n_out;
        }
        pre
    }

    /// Label in (0, 1).
    pub fn forward(&self, x: &[f64]) -> Result<f64, EngineError> {
        self.check_input(x)?;
        Ok(sigmoid(self.forward_trace(x).last().expect("at least one layer")[0]))
    }

    /// Label and its gradient with respect to every parameter.
    pub fn forward_with_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>), EngineError> {
        self.check_input(x)?;
        let pre = self.forward_trace(x);
        let label = sigmoid(pre.last().expect("at least one layer")[0]);
        let mut grad = vec![0.0; self.params.len()];
        let layers = self.layer_sizes.len() - 1;
        // offsets of each layer's parameter block
        let mut offsets = Vec::with_capacity(layers);
        let mut at = 0;
        for w in self.layer_sizes.windows(2) {
            offsets.push(at);
            at += w[0] * w[1] + w[1];
        }
        let mut delta = vec![label * (1.0 - label)];
        for l in (0..layers).rev() {
            let (n_in, n_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let input: Vec<f64> = if l == 0 {
                x.to_vec()
            } else {
                pre[l - 1].iter().map(|&v| leaky(v)).collect()
            };
            let base = offsets[l];
            for (o, d) in delta.iter().enumerate() {
                for (i, a) in input.iter().enumerate() {
                    grad[base + o * n_in + i] = d * a;
                }
                grad[base + n_in * n_out + o] = *d;
            }
            if l > 0 {
                let weights = &self.params[base..base + n_in * n_out];
                delta = (0..n_in)
                    .map(|i| {
                        let back: f64 = delta.iter().enumerate().map(|(o, d)| d * weights[o * n_in + i]).sum();
                        back * leaky_slope_at(pre[l - 1][i])
                    })
                    .collect();
            }
        }
        Ok((label, grad))
    }
}

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::calo::{mean_image, ImageSample};
use crate::engine::diversity;

/// Generated-to-real diversity ratio below which a run is flagged as collapsed.
pub const COLLAPSE_RATIO: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub generated_count: usize,
    pub real_count: usize,
    pub generated_mean: Vec<f64>,
    pub real_mean: Vec<f64>,
    /// `|mean generated - mean real|` per pixel.
    pub mae_per_pixel: Vec<f64>,
    pub mae: f64,
    /// Share of generated samples with at least one negative pixel.
    pub negative_fraction: f64,
    pub diversity_generated: f64,
    pub diversity_real: f64,
    pub diversity_ratio: f64,
    /// Count of samples whose largest pixel is at each index.
    pub peak_histogram: Vec<usize>,
    pub real_peak_histogram: Vec<usize>,
    pub mode_collapse: bool,
}

fn peaks(data: &[ImageSample], pixels: usize) -> Vec<usize> {
    let mut h = vec![0; pixels];
    for s in data {
        h[s.argmax()] += 1;
    }
    h
}

pub fn evaluate(generated: &[ImageSample], real: &[ImageSample]) -> Result<EvalReport, ExperimentError> {
    let pixels = real.first().map_or(0, ImageSample::len);
    if generated.iter().chain(real).any(|s| s.len() != pixels || pixels == 0) {
        return Err(ExperimentError::Config("generated and real samples must share one non-zero length".into()));
    }
    let generated_mean = mean_image(generated);
    let real_mean = mean_image(real);
    let mae_per_pixel: Vec<f64> = generated_mean.iter().zip(&real_mean).map(|(g, r)| (g - r).abs()).collect();
    let diversity_generated = diversity(generated)?;
    let diversity_real = diversity(real)?;
    let diversity_ratio = if diversity_real > 0.0 { diversity_generated / diversity_real } else { 0.0 };
    Ok(EvalReport {
        generated_count: generated.len(),
        real_count: real.len(),
        mae: mae_per_pixel.iter().sum::<f64>() / pixels as f64,
        mae_per_pixel,
        negative_fraction: generated.iter().filter(|s| s.min() < 0.0).count() as f64 / generated.len() as f64,
        diversity_generated,
        diversity_real,
        diversity_ratio,
        peak_histogram: peaks(generated, pixels),
        real_peak_histogram: peaks(real, pixels),
        mode_collapse: diversity_ratio < COLLAPSE_RATIO,
        generated_mean,
        real_mean,
    })
}

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{io_err, svg, ExperimentConfig, ExperimentError};
use crate::calo::{mean_image, ImageSample, ScaleRecord};
use crate::engine::TrainingRun;

pub const RUN_FILES: [&str; 7] = [
    "run.json",
    "losses.csv",
    "mean_image.csv",
    "samples.csv",
    "diversity.csv",
    "run_meta.json",
    "config.toml",
];
pub const SVG_FILES: [&str; 2] = ["losses.svg", "mean_image.svg"];

/// Enough to rerun: `cvqgan train --config run_meta.json` reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub config: ExperimentConfig,
    pub wall_time_seconds: f64,
    pub version: String,
    pub dataset_size: usize,
    pub dataset_mean: Vec<f64>,
    pub scale_record: Option<ScaleRecord>,
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), ExperimentError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io_err(&path))
}

/// Creates `dir` (refusing a non-empty one unless `force`) and writes every artifact.
pub fn write_run(
    dir: &Path,
    config: &ExperimentConfig,
    run: &TrainingRun,
    dataset: &[ImageSample],
    scale: Option<ScaleRecord>,
    wall_time_seconds: f64,
    force: bool,
) -> Result<(), ExperimentError> {
    prepare_dir(dir, force)?;
    let meta = RunMeta {
        seed: run.seed,
        config: config.clone(),
        wall_time_seconds,
        version: env!("CARGO_PKG_VERSION").to_string(),
        dataset_size: dataset.len(),
        dataset_mean: mean_image(dataset),
        scale_record: scale,
    };
    write(dir, "run.json", &run.to_json())?;
    write(dir, "losses.csv", &run.losses_csv())?;
    write(dir, "mean_image.csv", &run.mean_image_csv())?;
    write(dir, "samples.csv", &run.samples_csv())?;
    write(dir, "diversity.csv", &run.diversity_csv())?;
    write(dir, "run_meta.json", &serde_json::to_string_pretty(&meta).expect("meta serializes"))?;
    write(dir, "config.toml", &config.to_toml())?;
    if config.emit_svg {
        let epochs: Vec<f64> = run.epochs.iter().map(|e| e.epoch as f64).collect();
        let losses = svg::line_chart(
            &format!("{}: losses per epoch", config.name),
            &epochs,
            &[("generator", run.gen_losses()), ("discriminator", run.disc_losses())],
        );
        write(dir, "losses.svg", &losses)?;
        let generated = mean_image(&run.samples);
        let bars = svg::bar_chart(
            &format!("{}: mean image after {} epochs", config.name, run.epochs.len()),
            &[("generated", generated), ("data", meta.dataset_mean.clone())],
        );
        write(dir, "mean_image.svg", &bars)?;
    }
    Ok(())
}

pub(crate) fn prepare_dir(dir: &Path, force: bool) -> Result<(), ExperimentError> {
    if dir.exists() {
        let occupied = fs::read_dir(dir).map_err(io_err(dir))?.next().is_some();
        if occupied && !force {
            return Err(ExperimentError::Exists(dir.to_path_buf()));
        }
    }
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Reads `run.json` and `run_meta.json` from a run directory.
pub fn load_run(dir: &Path) -> Result<(TrainingRun, RunMeta), ExperimentError> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(io_err(&path))
    };
    let run = TrainingRun::from_json(&read("run.json")?)
        .map_err(|e| ExperimentError::Config(format!("{}: {e}", dir.join("run.json").display())))?;
    let meta = serde_json::from_str(&read("run_meta.json")?)
        .map_err(|e| ExperimentError::Config(format!("{}: {e}", dir.join("run_meta.json").display())))?;
    Ok((run, meta))
}

//! Presets, TOML overrides and the run directory written by `cvqgan train`.

use std::time::Instant;

use cvqgan::engine::train;
use cvqgan::experiment::{evaluate, load_run, preset, write_run, PRESETS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("presets: {}", PRESETS.join(", "));
    let config = preset("hybrid-dg3")?.merge_toml("[gan]\nepochs = 5\nrng_seed = 3\n\n[dataset]\nn = 200\n")?;
    println!("resolved config:\n{}", config.to_toml());

    let (data, scale) = config.dataset.load()?;
    let start = Instant::now();
    let run = train(&config.gan, &data)?;
    let dir = std::env::temp_dir().join("cvqgan-artifacts-example");
    write_run(&dir, &config, &run, &data, scale, start.elapsed().as_secs_f64(), true)?;
    for entry in std::fs::read_dir(&dir)? {
        println!("  {}", entry?.file_name().to_string_lossy());
    }

    let (reloaded, meta) = load_run(&dir)?;
    assert_eq!(reloaded, run);
    let report = evaluate(&reloaded.samples, &data)?;
    println!("seed {}, dataset size {}, mae {:.4}, diversity ratio {:.3}", meta.seed, meta.dataset_size, report.mae, report.diversity_ratio);
    Ok(())
}

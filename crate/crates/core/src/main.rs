use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use cvqgan::calo::{self, DataFormat, DatasetMeta};
use cvqgan::engine::{train, Architecture, EngineError};
use cvqgan::experiment::{
    evaluate, load_run, preset, run_selftest, write_run, ExperimentConfig, ExperimentError,
};

#[derive(Parser)]
#[command(name = "cvqgan", version, about = "Continuous-variable quantum GAN experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Write a synthetic reduced dataset and its metadata.
    Datagen(DatagenArgs),
    /// Train a GAN and write a run directory.
    Train(TrainArgs),
    /// Compare a run's samples with a dataset.
    Eval(EvalArgs),
    /// Run the built-in physics and gradient checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct SelftestArgs {
    /// Also write the results as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct DatagenArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long = "peak2", default_value_t = calo::DEFAULT_PEAK2_FRACTION)]
    peak2_fraction: f64,
    /// Skip max-normalization.
    #[arg(long)]
    raw: bool,
    /// CSV path; metadata goes next to it as `<stem>.meta.json`.
    #[arg(long, default_value = "data/synth.csv")]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

/// Every field mirrors a config-file key; flags win over the file.
#[derive(Args, Default)]
struct TrainArgs {
    /// One of fully-quantum-dg5, hybrid-dg5, hybrid-dg3, hybrid-latent3.
    #[arg(long)]
    preset: Option<String>,
    /// TOML config, or a previous run's run_meta.json.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    architecture: Option<Architecture>,
    #[arg(long)]
    num_modes: Option<usize>,
    #[arg(long)]
    gen_depth: Option<usize>,
    #[arg(long)]
    disc_depth: Option<usize>,
    #[arg(long)]
    latent_dim: Option<usize>,
    #[arg(long)]
    latent_mode: Option<usize>,
    #[arg(long)]
    readout_mode: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    classical_learning_rate: Option<f64>,
    #[arg(long)]
    adam_beta1: Option<f64>,
    #[arg(long)]
    adam_beta2: Option<f64>,
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long)]
    disc_steps: Option<usize>,
    #[arg(long)]
    init_scale: Option<f64>,
    #[arg(long)]
    probe_size: Option<usize>,
    #[arg(long)]
    sample_count: Option<usize>,
    /// Dataset CSV; without it a synthetic set is generated.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    data_format: Option<DataFormat>,
    #[arg(long)]
    data_n: Option<usize>,
    #[arg(long)]
    data_seed: Option<u64>,
    #[arg(long = "peak2")]
    peak2_fraction: Option<f64>,
    #[arg(long)]
    no_normalize: bool,
    #[arg(long)]
    no_svg: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Run directory written by `train`.
    run: PathBuf,
    /// Dataset CSV; defaults to the run's own dataset.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value = "reduced")]
    data_format: DataFormat,
    /// Report path; defaults to `<run>/eval.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

fn write_new(path: &Path, contents: &str, force: bool) -> Result<(), ExperimentError> {
    if path.exists() && !force {
        return Err(ExperimentError::Exists(path.to_path_buf()));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| ExperimentError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn datagen(args: DatagenArgs) -> Result<(), ExperimentError> {
    let raw = calo::synth_dataset(args.n, args.peak2_fraction, args.seed)?;
    let (data, scale) = if args.raw {
        (raw, None)
    } else {
        let (d, s) = calo::normalize(&raw)?;
        (d, Some(s))
    };
    let meta = DatasetMeta {
        n: data.len(),
        format: DataFormat::Reduced,
        scale_record: scale,
        seed: Some(args.seed),
        peak2_fraction: Some(args.peak2_fraction),
    };
    let meta_path = args.out.with_extension("meta.json");
    write_new(&args.out, &calo::format_dataset(&data), args.force)?;
    write_new(&meta_path, &serde_json::to_string_pretty(&meta).expect("meta serializes"), args.force)?;
    println!("wrote {} samples to {} ({})", data.len(), args.out.display(), meta_path.display());
    Ok(())
}

fn resolve(args: &TrainArgs) -> Result<ExperimentConfig, ExperimentError> {
    let mut c = match &args.preset {
        Some(p) => preset(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(path) = &args.config {
        c = c.merge_file(path)?;
    }
    macro_rules! set {
        ($($flag:ident => $($field:ident).+),* $(,)?) => {
            $(if let Some(v) = args.$flag.clone() { c.$($field).+ = v; })*
        };
    }
    set!(
        name => name,
        seed => gan.rng_seed,
        epochs => gan.epochs,
        cutoff => gan.cutoff,
        architecture => gan.architecture,
        num_modes => gan.num_modes,
        gen_depth => gan.gen_depth,
        latent_dim => gan.latent_dim,
        latent_mode => gan.latent_mode,
        batch_size => gan.batch_size,
        learning_rate => gan.learning_rate,
        classical_learning_rate => gan.classical_learning_rate,
        adam_beta1 => gan.adam_beta1,
        adam_beta2 => gan.adam_beta2,
        fd_step => gan.fd_step,
        disc_steps => gan.disc_steps,
        init_scale => gan.init_scale,
        probe_size => gan.probe_size,
        sample_count => gan.sample_count,
        data_format => dataset.format,
        data_n => dataset.n,
        data_seed => dataset.seed,
        peak2_fraction => dataset.peak2_fraction,
    );
    if let Some(v) = args.disc_depth {
        c.gan.disc_depth = Some(v);
    }
    if let Some(v) = args.readout_mode {
        c.gan.readout_mode = Some(v);
    }
    if let Some(v) = &args.data {
        c.dataset.path = Some(v.clone());
    }
    if let Some(v) = &args.out {
        c.out = Some(v.clone());
    }
    if args.no_normalize {
        c.dataset.normalize = false;
    }
    if args.no_svg {
        c.emit_svg = false;
    }
    Ok(c)
}

fn cmd_train(args: TrainArgs) -> Result<(), ExperimentError> {
    let config = resolve(&args)?;
    let errs = config.validate();
    if !errs.is_empty() {
        return Err(ExperimentError::Invalid(errs));
    }
    let dir = config.out_dir();
    if dir.exists() && !args.force && std::fs::read_dir(&dir).map(|mut d| d.next().is_some()).unwrap_or(false) {
        return Err(ExperimentError::Exists(dir));
    }
    let (data, scale) = config.dataset.load()?;
    eprintln!(
        "training {} ({:?}, d_g = {}, latent {}, {} epochs) on {} samples",
        config.name,
        config.gan.architecture,
        config.gan.gen_depth,
        config.gan.latent_dim,
        config.gan.epochs,
        data.len()
    );
    let start = Instant::now();
    let run = match train(&config.gan, &data) {
        Ok(run) => run,
        Err(e @ EngineError::NumericalFailure { .. }) => {
            write_failure(&dir, &e, args.force)?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    let wall = start.elapsed().as_secs_f64();
    write_run(&dir, &config, &run, &data, scale, wall, args.force)?;
    if let Some(last) = run.epochs.last() {
        eprintln!(
            "final gen_loss {:.4}, disc_loss {:.4}, mean image {:.4?}",
            last.gen_loss, last.disc_loss, last.mean_image
        );
    }
    println!("wrote {} in {wall:.1} s", dir.display());
    Ok(())
}

/// Keeps the parameter snapshot of a diverged run.
fn write_failure(dir: &Path, e: &EngineError, force: bool) -> Result<(), ExperimentError> {
    if let EngineError::NumericalFailure {
        epoch,
        stage,
        detail,
        generator,
        discriminator,
    } = e
    {
        let report = serde_json::json!({
            "epoch": epoch,
            "stage": stage,
            "detail": detail,
            "generator": generator,
            "discriminator": discriminator,
        });
        let path = dir.join("failure.json");
        write_new(&path, &serde_json::to_string_pretty(&report).expect("report serializes"), force)?;
        eprintln!("parameter snapshot written to {}", path.display());
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), ExperimentError> {
    let (run, meta) = load_run(&args.run)?;
    let real = match &args.data {
        Some(p) => {
            let d = calo::load_dataset(p, args.data_format)?;
            if meta.config.dataset.normalize {
                calo::normalize(&d)?.0
            } else {
                d
            }
        }
        None => meta.config.dataset.load()?.0,
    };
    let report = evaluate(&run.samples, &real)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let out = args.out.unwrap_or_else(|| args.run.join("eval.json"));
    write_new(&out, &json, args.force)?;
    println!("{json}");
    if report.mode_collapse {
        eprintln!("mode collapse: diversity ratio {:.3}", report.diversity_ratio);
    }
    Ok(())
}

fn cmd_selftest(args: SelftestArgs) -> Result<(), ExperimentError> {
    let results = run_selftest();
    if let Some(out) = &args.out {
        write_new(out, &serde_json::to_string_pretty(&results).expect("results serialize"), args.force)?;
    }
    println!("{:<18} {:<46} {:>10} {:>10}  result", "id", "check", "error", "tolerance");
    for r in &results {
        println!(
            "{:<18} {:<46} {:>10.3e} {:>10.0e}  {}",
            r.id,
            r.name,
            r.error,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(ExperimentError::Selftest(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Datagen(a) => datagen(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

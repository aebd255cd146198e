use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamState};
use super::discriminator::ClassicalDiscriminator;
use super::loss::{disc_loss, disc_loss_label_grads, gen_loss};
use super::model::{encode_real_sample, images_of, latent_batch, quantum_labels, LayerCache};
use super::{diversity, Architecture, EngineError, GanConfig};
use crate::calo::{mean_image, ImageSample};
use crate::cvnn::{init_params_with, CompiledStack, CvnnError, ParamFile, ParamVector};
use crate::fock::FockBatch;

/// Everything recorded for one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub gen_loss: f64,
    pub disc_loss: f64,
    /// Mean generated image over the fixed probe set, after this epoch's updates.
    pub mean_image: Vec<f64>,
    pub diversity: f64,
    pub mean_real_label: f64,
    pub mean_fake_label: f64,
    /// Extremes over every label produced this epoch.
    pub min_label: f64,
    pub max_label: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiscriminatorParams {
    Classical(ClassicalDiscriminator),
    Quantum(ParamFile),
}

impl DiscriminatorParams {
    pub fn values(&self) -> &[f64] {
        match self {
            DiscriminatorParams::Classical(d) => d.params(),
            DiscriminatorParams::Quantum(p) => &p.values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRun {
    pub config: GanConfig,
    pub seed: u64,
    pub epochs: Vec<EpochRecord>,
    /// `sample_count` images from the final generator.
    pub samples: Vec<ImageSample>,
    pub generator: ParamFile,
    pub discriminator: DiscriminatorParams,
}

impl TrainingRun {
    pub fn gen_losses(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.gen_loss).collect()
    }

    pub fn disc_losses(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.disc_loss).collect()
    }

    pub fn mean_images(&self) -> Vec<Vec<f64>> {
        self.epochs.iter().map(|e| e.mean_image.clone()).collect()
    }

    pub fn diversities(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.diversity).collect()
    }

    pub fn generator_params(&self) -> Result<ParamVector, EngineError> {
        Ok(ParamVector::try_from(self.generator.clone())?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn losses_csv(&self) -> String {
        let mut out = String::from("epoch,gen_loss,disc_loss\n");
        for e in &self.epochs {
            writeln!(out, "{},{:.17e},{:.17e}", e.epoch, e.gen_loss, e.disc_loss).expect("string write");
        }
        out
    }

    pub fn mean_image_csv(&self) -> String {
        let n = self.config.num_modes;
        let mut out = String::from("epoch");
        for i in 0..n {
            write!(out, ",pixel{i}").expect("string write");
        }
        out.push('\n');
        for e in &self.epochs {
            write!(out, "{}", e.epoch).expect("string write");
            for v in &e.mean_image {
                write!(out, ",{v:.17e}").expect("string write");
            }
            out.push('\n');
        }
        out
    }

    pub fn diversity_csv(&self) -> String {
        let mut out = String::from("epoch,diversity\n");
        for e in &self.epochs {
            writeln!(out, "{},{:.17e}", e.epoch, e.diversity).expect("string write");
        }
        out
    }

    pub fn samples_csv(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            let row: Vec<String> = s.pixels().iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

enum Disc {
    Classical(ClassicalDiscriminator),
    Quantum(ParamVector),
}

/// Loss and gradient of one update, as computed inside [`GanTrainer`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientProbe {
    pub loss: f64,
    pub gradient: Vec<f64>,
}

#[derive(Default)]
struct Labels {
    real: Vec<f64>,
    fake: Vec<f64>,
    extra: Vec<f64>,
}

/// Alternating trainer state. [`train`] drives it epoch by epoch.
pub struct GanTrainer<'a> {
    config: GanConfig,
    data: &'a [ImageSample],
    rng: ChaCha8Rng,
    gen: ParamVector,
    gen_opt: AdamState,
    disc: Disc,
    disc_opt: AdamState,
    probe: Vec<Vec<f64>>,
}

impl<'a> GanTrainer<'a> {
    pub fn new(config: &GanConfig, data: &'a [ImageSample]) -> Result<Self, EngineError> {
        let errs = config.validate();
        if !errs.is_empty() {
            return Err(EngineError::Config(errs));
        }
        if data.is_empty() {
            return Err(EngineError::Dataset("dataset is empty".into()));
        }
        for (i, s) in data.iter().enumerate() {
            if s.len() != config.num_modes {
                return Err(EngineError::Dataset(format!(
                    "sample {i} has {} pixels, expected {}",
                    s.len(),
                    config.num_modes
                )));
            }
            if s.pixels().iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(EngineError::Dataset(format!("sample {i} has a negative or non-finite pixel")));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let gen = init_params_with(config.num_modes, config.gen_depth, config.init_scale, &mut rng);
        let disc = match config.architecture {
            Architecture::Hybrid => Disc::Classical(ClassicalDiscriminator::init_with(
                &ClassicalDiscriminator::default_sizes(config.num_modes),
                &mut rng,
            )?),
            Architecture::FullyQuantum => Disc::Quantum(init_params_with(
                config.num_modes,
                config.disc_depth(),
                config.init_scale,
                &mut rng,
            )),
        };
        let probe = draw_latents(&mut rng, config.probe_size, config.latent_dim);
        Ok(Self {
            config: config.clone(),
            data,
            gen_opt: AdamState::new(gen.len()),
            disc_opt: AdamState::new(disc_values(&disc).len()),
            rng,
            gen,
            disc,
            probe,
        })
    }

    pub fn generator(&self) -> &ParamVector {
        &self.gen
    }

    pub fn discriminator_values(&self) -> &[f64] {
        disc_values(&self.disc)
    }

    fn quantum_adam(&self) -> Adam {
        Adam {
            lr: self.config.learning_rate,
            beta1: self.config.adam_beta1,
            beta2: self.config.adam_beta2,
        }
    }

    fn classical_adam(&self) -> Adam {
        Adam {
            lr: self.config.classical_learning_rate,
            ..self.quantum_adam()
        }
    }

    fn fail(&self, epoch: usize, stage: &'static str, detail: String) -> EngineError {
        EngineError::NumericalFailure {
            epoch,
            stage,
            detail,
            generator: self.gen.values().to_vec(),
            discriminator: self.discriminator_values().to_vec(),
        }
    }

    /// Turns gradient and loss errors caused by non-finite numbers into a
    /// failure carrying the epoch and a parameter snapshot.
    fn guard<T>(&self, epoch: usize, stage: &'static str, r: Result<T, EngineError>) -> Result<T, EngineError> {
        match r {
            Err(EngineError::Grad(e)) => Err(self.fail(epoch, stage, e.to_string())),
            Err(EngineError::Fock(e) | EngineError::Cvnn(CvnnError::Fock(e))) => Err(self.fail(epoch, stage, e.to_string())),
            Err(EngineError::Cvnn(e @ CvnnError::NonFinite { .. })) => Err(self.fail(epoch, stage, e.to_string())),
            other => other,
        }
    }

    fn generated_batch(&self, zs: &[Vec<f64>]) -> Result<FockBatch, EngineError> {
        let mut batch = latent_batch(zs, &self.config)?;
        CompiledStack::new(&self.gen, self.config.cutoff)?.apply_batch(&mut batch)?;
        Ok(batch)
    }

    /// Images `<x>` of the current generator for the given latent draws.
    pub fn images(&self, zs: &[Vec<f64>]) -> Result<Vec<ImageSample>, EngineError> {
        images_of(&self.generated_batch(zs)?)
    }

    fn real_batch(&mut self) -> Vec<ImageSample> {
        (0..self.config.batch_size)
            .map(|_| self.data[self.rng.random_range(0..self.data.len())].clone())
            .collect()
    }

    fn latents(&mut self) -> Vec<Vec<f64>> {
        draw_latents(&mut self.rng, self.config.batch_size, self.config.latent_dim)
    }

    fn disc_step(&mut self, epoch: usize, labels: &mut Labels) -> Result<f64, EngineError> {
        let real = self.real_batch();
        let zs = self.latents();
        let fake_batch = self.generated_batch(&zs)?;
        match &self.disc {
            Disc::Classical(d) => {
                let fake = images_of(&fake_batch)?;
                let mut grad = vec![0.0; d.params().len()];
                let forward = |xs: &[ImageSample]| -> Result<(Vec<f64>, Vec<Vec<f64>>), EngineError> {
                    let mut ls = Vec::with_capacity(xs.len());
                    let mut gs = Vec::with_capacity(xs.len());
                    for x in xs {
                        let (l, g) = d.forward_with_grad(x.pixels())?;
                        ls.push(l);
                        gs.push(g);
                    }
                    Ok((ls, gs))
                };
                let (lr, gr) = forward(&real)?;
                let (lf, gf) = forward(&fake)?;
                let loss = disc_loss(&lr, &lf);
                let (dr, df) = disc_loss_label_grads(&lr, &lf);
                for (w, g) in dr.iter().zip(&gr).chain(df.iter().zip(&gf)) {
                    for (acc, gi) in grad.iter_mut().zip(g) {
                        *acc += w * gi;
                    }
                }
                if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                    return Err(self.fail(epoch, "discriminator update", format!("loss {loss}")));
                }
                labels.real.extend(&lr);
                labels.fake.extend(&lf);
                let adam = self.classical_adam();
                if let Disc::Classical(d) = &mut self.disc {
                    adam.step(&mut self.disc_opt, d.params_mut(), &grad);
                }
                Ok(loss)
            }
            Disc::Quantum(p) => {
                let mut states = real
                    .iter()
                    .map(|x| encode_real_sample(x.pixels(), &self.config))
                    .collect::<Result<Vec<_>, _>>()?;
                states.extend(fake_batch.states());
                let input = FockBatch::from_states(&states)?;
                let n_real = real.len();
                let readout = self.config.readout_mode();
                let measure = |b: &FockBatch| -> Result<f64, EngineError> {
                    let ls = quantum_labels(b, readout)?;
                    Ok(disc_loss(&ls[..n_real], &ls[n_real..]))
                };
                let result = LayerCache::new(p, self.config.cutoff, input)
                    .and_then(|cache| {
                        let ls = quantum_labels(cache.output(), readout)?;
                        let g = cache.gradient(None, self.config.fd_step, measure)?;
                        Ok((ls, g))
                    });
                let (ls, (loss, grad)) = self.guard(epoch, "discriminator update", result)?;
                if !loss.is_finite() {
                    return Err(self.fail(epoch, "discriminator update", format!("loss {loss}")));
                }
                labels.real.extend(&ls[..n_real]);
                labels.fake.extend(&ls[n_real..]);
                let adam = self.quantum_adam();
                if let Disc::Quantum(p) = &mut self.disc {
                    adam.step(&mut self.disc_opt, p.values_mut(), &grad);
                }
                Ok(loss)
            }
        }
    }

    /// Generator loss and gradient on fresh latent draws `zs`, without updating.
    pub fn generator_gradient(&self, zs: &[Vec<f64>], h: f64) -> Result<GradientProbe, EngineError> {
        let (loss, gradient, _) = self.generator_gradient_with_labels(zs, h)?;
        Ok(GradientProbe { loss, gradient })
    }

    fn generator_gradient_with_labels(&self, zs: &[Vec<f64>], h: f64) -> Result<(f64, Vec<f64>, Vec<f64>), EngineError> {
        let cache = LayerCache::new(&self.gen, self.config.cutoff, latent_batch(zs, &self.config)?)?;
        match &self.disc {
            Disc::Classical(d) => {
                let labels_of = |b: &FockBatch| -> Result<Vec<f64>, EngineError> {
                    images_of(b)?.iter().map(|img| d.forward(img.pixels())).collect()
                };
                let labels = labels_of(cache.output())?;
                let (loss, grad) = cache.gradient(None, h, |b| Ok(gen_loss(&labels_of(b)?)))?;
                Ok((loss, grad, labels))
            }
            Disc::Quantum(p) => {
                let suffix = CompiledStack::new(p, self.config.cutoff)?;
                let readout = self.config.readout_mode();
                let mut out = cache.output().clone();
                suffix.apply_batch(&mut out)?;
                let labels = quantum_labels(&out, readout)?;
                let (loss, grad) = cache.gradient(Some(&suffix), h, |b| Ok(gen_loss(&quantum_labels(b, readout)?)))?;
                Ok((loss, grad, labels))
            }
        }
    }

    fn gen_step(&mut self, epoch: usize, labels: &mut Labels) -> Result<f64, EngineError> {
        let zs = self.latents();
        let result = self.generator_gradient_with_labels(&zs, self.config.fd_step);
        let (loss, grad, ls) = self.guard(epoch, "generator update", result)?;
        if !loss.is_finite() {
            return Err(self.fail(epoch, "generator update", format!("loss {loss}")));
        }
        labels.extra.extend(ls);
        let adam = self.quantum_adam();
        adam.step(&mut self.gen_opt, self.gen.values_mut(), &grad);
        Ok(loss)
    }

    /// One discriminator phase and one generator update.
    pub fn epoch(&mut self, epoch: usize) -> Result<EpochRecord, EngineError> {
        let r = self.epoch_inner(epoch);
        self.guard(epoch, "epoch", r)
    }

    fn epoch_inner(&mut self, epoch: usize) -> Result<EpochRecord, EngineError> {
        let mut labels = Labels::default();
        let mut d_loss = 0.0;
        for _ in 0..self.config.disc_steps {
            d_loss = self.disc_step(epoch, &mut labels)?;
        }
        let g_loss = self.gen_step(epoch, &mut labels)?;
        let probe = self.images(&self.probe)?;
        let mean = mean_image(&probe);
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(self.fail(epoch, "probe images", "non-finite mean image".into()));
        }
        let all = labels.real.iter().chain(&labels.fake).chain(&labels.extra);
        let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        Ok(EpochRecord {
            epoch,
            gen_loss: g_loss,
            disc_loss: d_loss,
            mean_image: mean,
            diversity: diversity(&probe)?,
            mean_real_label: avg(&labels.real),
            mean_fake_label: avg(&labels.fake),
            min_label: all.clone().copied().fold(f64::INFINITY, f64::min),
            max_label: all.copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Final samples and parameters; consumes the trainer.
    pub fn finish(mut self, epochs: Vec<EpochRecord>) -> Result<TrainingRun, EngineError> {
        let zs = draw_latents(&mut self.rng, self.config.sample_count, self.config.latent_dim);
        let samples = self.images(&zs)?;
        Ok(TrainingRun {
            seed: self.config.rng_seed,
            config: self.config.clone(),
            epochs,
            samples,
            generator: ParamFile::from(&self.gen),
            discriminator: match self.disc {
                Disc::Classical(d) => DiscriminatorParams::Classical(d),
                Disc::Quantum(p) => DiscriminatorParams::Quantum(ParamFile::from(&p)),
            },
        })
    }
}

fn disc_values(d: &Disc) -> &[f64] {
    match d {
        Disc::Classical(d) => d.params(),
        Disc::Quantum(p) => p.values(),
    }
}

fn draw_latents(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| StandardNormal.sample(rng)).collect())
        .collect()
}

/// Alternating GAN training; deterministic for a given `config.rng_seed`.
pub fn train(config: &GanConfig, dataset: &[ImageSample]) -> Result<TrainingRun, EngineError> {
    let mut trainer = GanTrainer::new(config, dataset)?;
    let mut records = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let rec = trainer.epoch(epoch)?;
        log::info!(
            "epoch {epoch}: gen_loss {:.4} disc_loss {:.4} mean_image {:?}",
            rec.gen_loss,
            rec.disc_loss,
            rec.mean_image
        );
        records.push(rec);
    }
    trainer.finish(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calo::{normalize, synth_dataset};

    fn data() -> Vec<ImageSample> {
        normalize(&synth_dataset(200, 0.1, 3).unwrap()).unwrap().0
    }

    fn small(arch: Architecture, epochs: usize) -> GanConfig {
        GanConfig {
            architecture: arch,
            gen_depth: 2,
            cutoff: 6,
            epochs,
            batch_size: 4,
            probe_size: 8,
            sample_count: 10,
            rng_seed: 17,
            ..GanConfig::default()
        }
    }

    #[test]
    fn zero_epochs() {
        let c = small(Architecture::Hybrid, 0);
        let run = train(&c, &data()).unwrap();
        assert!(run.epochs.is_empty());
        assert_eq!(run.samples.len(), 10);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let init = init_params_with(3, 2, c.init_scale, &mut rng);
        assert_eq!(run.generator_params().unwrap(), init);
        assert_eq!(run.losses_csv(), "epoch,gen_loss,disc_loss\n");
    }

    #[test]
    fn hybrid_is_deterministic() {
        let c = small(Architecture::Hybrid, 3);
        let d = data();
        let a = train(&c, &d).unwrap();
        let b = train(&c, &d).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.epochs.len(), 3);
        assert!(a.epochs.iter().all(|e| e.mean_image.len() == 3 && e.gen_loss.is_finite()));
        let other = train(&GanConfig { rng_seed: 18, ..c }, &d).unwrap();
        assert_ne!(a.losses_csv(), other.losses_csv());
    }

    #[test]
    fn quantum_runs_with_labels_in_range() {
        let c = GanConfig { disc_depth: Some(1), ..small(Architecture::FullyQuantum, 2) };
        let run = train(&c, &data()).unwrap();
        assert_eq!(run.epochs.len(), 2);
        for e in &run.epochs {
            assert!(e.min_label > 0.0 && e.max_label < 1.0);
            assert!(e.disc_loss.is_finite() && e.gen_loss.is_finite());
        }
        assert!(matches!(run.discriminator, DiscriminatorParams::Quantum(_)));
    }

    #[test]
    fn json_round_trip() {
        let run = train(&small(Architecture::Hybrid, 1), &data()).unwrap();
        assert_eq!(TrainingRun::from_json(&run.to_json()).unwrap(), run);
        assert_eq!(run.losses_csv().lines().count(), 2);
        assert_eq!(run.samples_csv().lines().count(), 10);
    }

    #[test]
    fn bad_inputs() {
        let c = small(Architecture::Hybrid, 1);
        assert!(matches!(train(&c, &[]), Err(EngineError::Dataset(_))));
        assert!(matches!(train(&c, &[ImageSample(vec![1.0, 2.0])]), Err(EngineError::Dataset(_))));
        assert!(matches!(train(&c, &[ImageSample(vec![1.0, -2.0, 0.0])]), Err(EngineError::Dataset(_))));
        let bad = GanConfig { latent_dim: 0, batch_size: 0, ..c };
        match train(&bad, &data()) {
            Err(EngineError::Config(errs)) => assert_eq!(errs.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn divergence_reports_epoch_and_snapshot() {
        // a huge learning rate sends the circuit parameters far enough to overflow
        let c = GanConfig { learning_rate: 1e300, ..small(Architecture::Hybrid, 4) };
        match train(&c, &data()) {
            Err(EngineError::NumericalFailure { epoch, generator, .. }) => {
                assert!(epoch < 4);
                assert_eq!(generator.len(), crate::cvnn::param_count(3, 2));
            }
            other => panic!("expected a numerical failure, got {:?}", other.map(|r| r.epochs.len())),
        }
    }

    #[test]
    fn richardson_agreement_on_generator_gradient() {
        let c = small(Architecture::Hybrid, 0);
        let d = data();
        let t = GanTrainer::new(&c, &d).unwrap();
        let zs = vec![vec![0.4], vec![-0.8], vec![1.2], vec![0.1]];
        let g1 = t.generator_gradient(&zs, 1e-3).unwrap();
        let g2 = t.generator_gradient(&zs, 5e-4).unwrap();
        assert_eq!(g1.loss, g2.loss);
        for (a, b) in g1.gradient.iter().zip(&g2.gradient) {
            assert!((a - b).abs() <= 0.01 * a.abs().max(b.abs()) + 1e-9, "{a} vs {b}");
        }
    }
}

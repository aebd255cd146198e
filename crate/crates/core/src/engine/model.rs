use num_complex::Complex64;

use super::discriminator::{sigmoid, ClassicalDiscriminator};
use super::grad::fd_gradient_by;
use super::{Architecture, EngineError, GanConfig};
use crate::calo::ImageSample;
use crate::cvnn::{CompiledLayer, CompiledStack, ParamVector};
use crate::fock::{displacement_matrix, FockBatch, FockState};

/// Product of single-mode states given by their Fock columns; mode 0 varies fastest.
fn product_state(cutoff: usize, columns: &[Vec<Complex64>]) -> Result<FockState, EngineError> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for col in columns {
        let mut next = Vec::with_capacity(amps.len() * cutoff);
        for c in col {
            next.extend(amps.iter().map(|a| a * c));
        }
        amps = next;
    }
    Ok(FockState::from_amplitudes(columns.len(), cutoff, amps)?)
}

fn coherent_column(alpha: f64, cutoff: usize) -> Vec<Complex64> {
    let d = displacement_matrix(Complex64::new(alpha, 0.0), cutoff);
    (0..cutoff).map(|m| d.get(m, 0)).collect()
}

fn vacuum_column(cutoff: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); cutoff];
    v[0] = Complex64::new(1.0, 0.0);
    v
}

fn check_finite(what: &'static str, values: &[f64]) -> Result<(), EngineError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(EngineError::Dataset(format!("{what} contains a non-finite value")))
    }
}

/// `D(z_0) (x) D(z_1) ... |0...0>` with entry `k` of `z` on latent mode `k`.
pub fn prepare_latent_state(z: &[f64], config: &GanConfig) -> Result<FockState, EngineError> {
    if z.len() != config.latent_dim {
        return Err(EngineError::Shape {
            what: "latent vector",
            expected: config.latent_dim,
            found: z.len(),
        });
    }
    check_finite("latent vector", z)?;
    let mut columns = vec![vacuum_column(config.cutoff); config.num_modes];
    for (&mode, &zk) in config.latent_modes().iter().zip(z) {
        columns[mode] = coherent_column(zk, config.cutoff);
    }
    product_state(config.cutoff, &columns)
}

/// Real image `x` as `prod_i D(x_i / 2) |0>`, so that `<x_i> = x_i`.
pub fn encode_real_sample(x: &[f64], config: &GanConfig) -> Result<FockState, EngineError> {
    if x.len() != config.num_modes {
        return Err(EngineError::Shape {
            what: "image",
            expected: config.num_modes,
            found: x.len(),
        });
    }
    check_finite("image", x)?;
    let columns: Vec<_> = x.iter().map(|&v| coherent_column(v / 2.0, config.cutoff)).collect();
    product_state(config.cutoff, &columns)
}

fn check_params(what: &'static str, params: &ParamVector, config: &GanConfig, depth: usize) -> Result<(), EngineError> {
    if params.num_modes() != config.num_modes {
        return Err(EngineError::Shape {
            what,
            expected: config.num_modes,
            found: params.num_modes(),
        });
    }
    if params.depth() != depth {
        return Err(EngineError::Shape {
            what,
            expected: depth,
            found: params.depth(),
        });
    }
    Ok(())
}

/// Latent state followed by the generator layers, unmeasured.
pub fn generator_state(params: &ParamVector, z: &[f64], config: &GanConfig) -> Result<FockState, EngineError> {
    check_params("generator depth", params, config, config.gen_depth)?;
    let mut state = prepare_latent_state(z, config)?;
    CompiledStack::new(params, config.cutoff)?.apply(&mut state)?;
    Ok(state)
}

/// `<x>` on every mode of the generator state.
pub fn generate_image(params: &ParamVector, z: &[f64], config: &GanConfig) -> Result<ImageSample, EngineError> {
    if config.architecture != Architecture::Hybrid {
        return Err(EngineError::HybridOnly("generate_image"));
    }
    Ok(ImageSample(generator_state(params, z, config)?.expectation_x_all()?))
}

/// Discriminator layers on `state`, then `sigmoid(<x>)` on the readout mode.
pub fn quantum_discriminate(state: &FockState, disc_params: &ParamVector, config: &GanConfig) -> Result<f64, EngineError> {
    if config.architecture != Architecture::FullyQuantum {
        return Err(EngineError::QuantumOnly("quantum_discriminate"));
    }
    check_params("discriminator depth", disc_params, config, config.disc_depth())?;
    let mut s = state.clone();
    CompiledStack::new(disc_params, config.cutoff)?.apply(&mut s)?;
    Ok(sigmoid(s.expectation_x(config.readout_mode())?))
}

pub fn classical_discriminate(disc: &ClassicalDiscriminator, img: &ImageSample) -> Result<f64, EngineError> {
    disc.forward(img.pixels())
}

/// Mean pairwise Euclidean distance.
pub fn diversity(samples: &[ImageSample]) -> Result<f64, EngineError> {
    let n = samples.len();
    if n < 2 {
        return Err(EngineError::TooFewSamples(n));
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += samples[i]
                .pixels()
                .iter()
                .zip(samples[j].pixels())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
        }
    }
    Ok(total / (n * (n - 1) / 2) as f64)
}

pub(crate) fn latent_batch(zs: &[Vec<f64>], config: &GanConfig) -> Result<FockBatch, EngineError> {
    let states = zs.iter().map(|z| prepare_latent_state(z, config)).collect::<Result<Vec<_>, _>>()?;
    Ok(FockBatch::from_states(&states)?)
}

pub(crate) fn images_of(batch: &FockBatch) -> Result<Vec<ImageSample>, EngineError> {
    let per_mode = (0..batch.num_modes())
        .map(|m| batch.expectation_x(m))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..batch.len())
        .map(|b| ImageSample(per_mode.iter().map(|xs| xs[b]).collect()))
        .collect())
}

pub(crate) fn quantum_labels(batch: &FockBatch, readout: usize) -> Result<Vec<f64>, EngineError> {
    Ok(batch.expectation_x(readout)?.into_iter().map(sigmoid).collect())
}

/// States before each controlled layer, for gradients by finite differences
/// that only rerun the perturbed layer and what follows it.
pub(crate) struct LayerCache {
    params: ParamVector,
    cutoff: usize,
    stack: CompiledStack,
    before: Vec<FockBatch>,
    output: FockBatch,
}

impl LayerCache {
    pub(crate) fn new(params: &ParamVector, cutoff: usize, input: FockBatch) -> Result<Self, EngineError> {
        let stack = CompiledStack::new(params, cutoff)?;
        let mut before = Vec::with_capacity(params.depth());
        let mut state = input;
        for layer in stack.layers() {
            before.push(state.clone());
            layer.apply_batch(&mut state)?;
        }
        Ok(Self {
            params: params.clone(),
            cutoff,
            stack,
            before,
            output: state,
        })
    }

    pub(crate) fn output(&self) -> &FockBatch {
        &self.output
    }

    /// Output with flat coordinate `k` shifted by `delta`.
    pub(crate) fn perturbed(&self, k: usize, delta: f64) -> Result<FockBatch, EngineError> {
        let l = self.params.layer_of(k);
        let mut values = self.params.layer_slice(l).to_vec();
        let per = values.len();
        values[k - l * per] += delta;
        let layer = CompiledLayer::from_flat(self.params.num_modes(), &values, self.cutoff)?;
        let mut state = self.before[l].clone();
        layer.apply_batch(&mut state)?;
        self.stack.apply_batch_from(l + 1, &mut state)?;
        Ok(state)
    }

    /// Base loss and its central-difference gradient, where the loss is
    /// `measure` of the output passed through `suffix`.
    pub(crate) fn gradient<M>(&self, suffix: Option<&CompiledStack>, h: f64, measure: M) -> Result<(f64, Vec<f64>), EngineError>
    where
        M: Fn(&FockBatch) -> Result<f64, EngineError> + Sync,
    {
        let finish = |mut state: FockBatch| -> Result<f64, EngineError> {
            if let Some(s) = suffix {
                s.apply_batch(&mut state)?;
            }
            measure(&state)
        };
        let base = finish(self.output.clone())?;
        let grad = fd_gradient_by(self.params.len(), h, |k, delta| finish(self.perturbed(k, delta)?))?;
        Ok((base, grad))
    }
}

/// Central-difference gradient of `measure(layers(input))` over the layer
/// parameters, rerunning only the layers at and after each perturbed one.
pub fn layered_fd_gradient<M>(params: &ParamVector, cutoff: usize, input: &FockBatch, h: f64, measure: M) -> Result<Vec<f64>, EngineError>
where
    M: Fn(&FockBatch) -> Result<f64, EngineError> + Sync,
{
    let cache = LayerCache::new(params, cutoff, input.clone())?;
    Ok(cache.gradient(None, h, measure)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvnn::{apply_layer, init_params, LayerParams};
    use crate::engine::fd_gradient;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn hybrid(latent_dim: usize, depth: usize) -> GanConfig {
        GanConfig {
            latent_dim,
            gen_depth: depth,
            ..GanConfig::default()
        }
    }

    fn quantum(depth: usize) -> GanConfig {
        GanConfig {
            architecture: Architecture::FullyQuantum,
            gen_depth: depth,
            ..GanConfig::default()
        }
    }

    #[test]
    fn zero_latent_is_vacuum() {
        let s = prepare_latent_state(&[0.0], &hybrid(1, 1)).unwrap();
        assert!(s.max_abs_diff(&FockState::vacuum(3, 8).unwrap()) < 1e-15);
    }

    #[test]
    fn latent_means() {
        let c = GanConfig { cutoff: 20, ..hybrid(1, 1) };
        let x = prepare_latent_state(&[0.5], &c).unwrap().expectation_x_all().unwrap();
        for (a, b) in x.iter().zip([1.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-6);
        }
        let c = GanConfig { cutoff: 20, ..hybrid(3, 1) };
        let x = prepare_latent_state(&[0.1, 0.2, 0.3], &c).unwrap().expectation_x_all().unwrap();
        for (a, b) in x.iter().zip([0.2, 0.4, 0.6]) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!(matches!(prepare_latent_state(&[0.1, 0.2], &c), Err(EngineError::Shape { .. })));
    }

    #[test]
    fn latent_matches_displacement_gates() {
        let c = hybrid(3, 1);
        let z = [0.4, -0.9, 1.3];
        let mut expect = FockState::vacuum(3, 8).unwrap();
        for (m, zk) in z.iter().enumerate() {
            expect.displace(m, Complex64::new(*zk, 0.0)).unwrap();
        }
        assert!(prepare_latent_state(&z, &c).unwrap().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn real_encoding_reproduces_pixels() {
        let c = GanConfig { cutoff: 20, ..quantum(1) };
        let x = encode_real_sample(&[0.3, 1.0, 0.45], &c).unwrap().expectation_x_all().unwrap();
        for (a, b) in x.iter().zip([0.3, 1.0, 0.45]) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_generator() {
        let c = hybrid(1, 4);
        let p = ParamVector::zeros(3, 4);
        let s = generator_state(&p, &[0.0], &c).unwrap();
        assert!(s.max_abs_diff(&FockState::vacuum(3, 8).unwrap()) < 1e-15);
        assert_eq!(generate_image(&p, &[0.0], &c).unwrap(), ImageSample(vec![0.0; 3]));
        assert!(generator_state(&ParamVector::zeros(3, 2), &[0.0], &c).is_err());
        assert!(matches!(generate_image(&p, &[0.0], &quantum(4)), Err(EngineError::HybridOnly(_))));
    }

    #[test]
    fn displacement_only_layer_image() {
        let mut layer = LayerParams::zeros(3);
        layer.disp_re = vec![0.3, 0.2, 0.1];
        let c = GanConfig { cutoff: 12, ..hybrid(1, 1) };
        let p = ParamVector::pack(std::slice::from_ref(&layer)).unwrap();
        let img = generate_image(&p, &[0.0], &c).unwrap();
        let direct = apply_layer(&FockState::vacuum(3, 12).unwrap(), &layer).unwrap().expectation_x_all().unwrap();
        assert_eq!(img.pixels(), &direct[..]);
        for (a, b) in img.pixels().iter().zip([0.6, 0.4, 0.2]) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn generator_norm_after_init() {
        let c = hybrid(1, 5);
        let p = init_params(3, 5, 21, 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut kept = 0;
        for _ in 0..100 {
            let z: f64 = StandardNormal.sample(&mut rng);
            let norm = generator_state(&p, &[z], &c).unwrap().norm();
            // large |z| leaks through the latent displacement alone at cutoff 8
            if z.abs() <= 1.5 {
                assert!(norm >= 0.99, "z = {z}: norm {norm}");
            }
            let bare = prepare_latent_state(&[z], &c).unwrap().norm();
            assert!(norm >= bare - 0.01, "z = {z}: {norm} vs {bare}");
            kept += usize::from(norm >= 0.99);
        }
        assert!(kept >= 90, "{kept}");
    }

    #[test]
    fn batch_of_images() {
        let c = hybrid(1, 3);
        let p = init_params(3, 3, 2, 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let zs: Vec<Vec<f64>> = (0..64).map(|_| vec![StandardNormal.sample(&mut rng)]).collect();
        let mut batch = latent_batch(&zs, &c).unwrap();
        CompiledStack::new(&p, 8).unwrap().apply_batch(&mut batch).unwrap();
        let imgs = images_of(&batch).unwrap();
        assert_eq!(imgs.len(), 64);
        for (img, z) in imgs.iter().zip(&zs) {
            assert_eq!(img.len(), 3);
            assert!(img.pixels().iter().all(|v| v.is_finite()));
            let single = generate_image(&p, z, &c).unwrap();
            for (a, b) in img.pixels().iter().zip(single.pixels()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quantum_discriminator_basics() {
        let c = quantum(2);
        let zero = ParamVector::zeros(3, 2);
        assert_eq!(quantum_discriminate(&FockState::vacuum(3, 8).unwrap(), &zero, &c).unwrap(), 0.5);
        assert!(matches!(
            quantum_discriminate(&FockState::vacuum(3, 8).unwrap(), &zero, &hybrid(1, 2)),
            Err(EngineError::QuantumOnly(_))
        ));
        let d = init_params(3, 2, 3, 0.3);
        let mut last = 0.0;
        for k in 0..12 {
            let x = -1.2 + 0.2 * k as f64;
            let mut s = FockState::vacuum(3, 16).unwrap();
            s.displace(2, Complex64::new(x / 2.0, 0.0)).unwrap();
            let l = quantum_discriminate(&s, &ParamVector::zeros(3, 2), &GanConfig { cutoff: 16, ..c.clone() }).unwrap();
            assert!(l > last && l < 1.0);
            last = l;
            let l = quantum_discriminate(&s, &d, &GanConfig { cutoff: 16, ..c.clone() }).unwrap();
            assert!(l > 0.0 && l < 1.0);
        }
    }

    #[test]
    fn composed_map_is_linear_in_the_state() {
        // generator then discriminator layers act on one unmeasured state
        let c = quantum(2);
        let g = init_params(3, 2, 8, 0.1);
        let d = init_params(3, 2, 9, 0.1);
        let run = |s: &FockState| {
            let mut s = s.clone();
            CompiledStack::new(&g, 8).unwrap().apply(&mut s).unwrap();
            CompiledStack::new(&d, 8).unwrap().apply(&mut s).unwrap();
            s
        };
        let a = prepare_latent_state(&[0.4], &c).unwrap();
        let b = prepare_latent_state(&[-0.7], &c).unwrap();
        let (ca, cb) = (Complex64::new(0.6, 0.2), Complex64::new(-0.3, 0.5));
        let mix = |x: &FockState, y: &FockState| {
            let amps = x.amplitudes().iter().zip(y.amplitudes()).map(|(p, q)| ca * p + cb * q).collect();
            FockState::from_amplitudes(3, 8, amps).unwrap()
        };
        let lhs = run(&mix(&a, &b));
        let rhs = mix(&run(&a), &run(&b));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn diversity_examples() {
        assert_eq!(diversity(&vec![ImageSample(vec![0.2, 0.5, 0.1]); 5]).unwrap(), 0.0);
        let two = [ImageSample(vec![0.0; 3]), ImageSample(vec![1.0, 0.0, 0.0])];
        assert_eq!(diversity(&two).unwrap(), 1.0);
        assert!(matches!(diversity(&two[..1]), Err(EngineError::TooFewSamples(1))));
        let real = crate::calo::synth_dataset(200, 0.1, 1).unwrap();
        assert!(diversity(&real).unwrap() > 0.0);
    }

    #[test]
    fn layered_gradient_is_bit_identical_to_plain_differences() {
        let c = hybrid(1, 3);
        let p = init_params(3, 3, 4, 0.1);
        let zs = vec![vec![0.3], vec![-1.1], vec![0.8]];
        let input = latent_batch(&zs, &c).unwrap();
        let measure = |b: &FockBatch| -> Result<f64, EngineError> {
            Ok(images_of(b)?.iter().map(|img| img.pixels()[1] + 0.5 * img.pixels()[2].powi(2)).sum())
        };
        let fast = layered_fd_gradient(&p, 8, &input, 1e-3, measure).unwrap();
        let slow = fd_gradient(
            |v| {
                let pv = ParamVector::from_values(3, 3, v.to_vec()).unwrap();
                let mut b = input.clone();
                CompiledStack::new(&pv, 8).unwrap().apply_batch(&mut b).unwrap();
                measure(&b).unwrap()
            },
            p.values(),
            1e-3,
        )
        .unwrap();
        assert_eq!(fast.len(), p.len());
        assert!(fast.iter().zip(&slow).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(fast.iter().any(|g| g.abs() > 1e-3));
    }

    #[test]
    fn unaffected_loss_has_zero_gradient() {
        let c = hybrid(1, 2);
        let p = init_params(3, 2, 4, 0.1);
        let input = latent_batch(&[vec![0.5], vec![-0.5]], &c).unwrap();
        let disc = ClassicalDiscriminator::zeros(&ClassicalDiscriminator::default_sizes(3)).unwrap();
        let g = layered_fd_gradient(&p, 8, &input, 1e-3, |b| {
            let labels = images_of(b)?.iter().map(|i| disc.forward(i.pixels())).collect::<Result<Vec<_>, _>>()?;
            Ok(crate::engine::gen_loss(&labels))
        })
        .unwrap();
        assert!(g.iter().all(|&x| x == 0.0));
    }
}

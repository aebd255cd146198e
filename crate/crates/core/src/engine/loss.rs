//! Binary cross-entropy GAN losses on discriminator labels.

pub const LABEL_CLAMP: f64 = 1e-7;

pub fn clamp_label(l: f64) -> f64 {
    l.clamp(LABEL_CLAMP, 1.0 - LABEL_CLAMP)
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    values.sum::<f64>() / n as f64
}

/// `-mean(log l_real) - mean(log(1 - l_fake))`.
pub fn disc_loss(real: &[f64], fake: &[f64]) -> f64 {
    -mean(real.iter().map(|&l| clamp_label(l).ln())) - mean(fake.iter().map(|&l| (1.0 - clamp_label(l)).ln()))
}

/// Non-saturating generator loss `-mean(log l_fake)`.
pub fn gen_loss(fake: &[f64]) -> f64 {
    -mean(fake.iter().map(|&l| clamp_label(l).ln()))
}

/// Derivatives of [`disc_loss`] with respect to each real and fake label.
/// Zero where the clamp is active.
pub fn disc_loss_label_grads(real: &[f64], fake: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let in_range = |l: f64| (LABEL_CLAMP..=1.0 - LABEL_CLAMP).contains(&l);
    let nr = real.len() as f64;
    let nf = fake.len() as f64;
    (
        real.iter().map(|&l| if in_range(l) { -1.0 / (nr * l) } else { 0.0 }).collect(),
        fake.iter().map(|&l| if in_range(l) { 1.0 / (nf * (1.0 - l)) } else { 0.0 }).collect(),
    )
}

//! Classical discriminator backprop against central differences, and
//! step-halving of the circuit finite differences.

use num_complex::Complex64;

use cvqgan::cvnn::init_params;
use cvqgan::engine::{fd_gradient, layered_fd_gradient, ClassicalDiscriminator, EngineError};
use cvqgan::fock::{FockBatch, FockState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sizes = ClassicalDiscriminator::default_sizes(3);
    let disc = ClassicalDiscriminator::init(&sizes, 9)?;
    let x = [0.2, 0.9, 0.4];
    let (label, analytic) = disc.forward_with_grad(&x)?;
    let numeric = fd_gradient(
        |p: &[f64]| ClassicalDiscriminator::from_params(&sizes, p.to_vec()).unwrap().forward(&x).unwrap(),
        disc.params(),
        1e-6,
    )?;
    let worst = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("D(x) = {label:.6}, {} parameters, max |backprop - FD| = {worst:.2e}", analytic.len());

    let params = init_params(3, 3, 1, 0.1);
    let states = [0.3, -0.6, 1.1]
        .iter()
        .map(|&z| {
            let mut s = FockState::vacuum(3, 8)?;
            s.displace(0, Complex64::new(z, 0.0))?;
            Ok(s)
        })
        .collect::<Result<Vec<_>, cvqgan::fock::FockError>>()?;
    let input = FockBatch::from_states(&states)?;
    let measure = |b: &FockBatch| -> Result<f64, EngineError> { Ok(b.expectation_x(2)?.iter().sum()) };
    let g1 = layered_fd_gradient(&params, 8, &input, 1e-3, measure)?;
    let g2 = layered_fd_gradient(&params, 8, &input, 5e-4, measure)?;
    let rel = g1
        .iter()
        .zip(&g2)
        .filter(|(a, b)| a.abs().max(b.abs()) > 1e-9)
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()))
        .fold(0.0, f64::max);
    println!("circuit gradient, h vs h/2: worst relative change {rel:.2e}");
    Ok(())
}

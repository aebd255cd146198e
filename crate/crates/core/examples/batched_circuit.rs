//! Batched evaluation: many latent states through one compiled stack.

use std::time::Instant;

use num_complex::Complex64;

use cvqgan::cvnn::{init_params, CompiledStack};
use cvqgan::fock::{FockBatch, FockState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (modes, cutoff, depth, count) = (3, 8, 8, 64);
    let params = init_params(modes, depth, 3, 0.05);
    let stack = CompiledStack::new(&params, cutoff)?;
    let states = (0..count)
        .map(|k| {
            let mut s = FockState::vacuum(modes, cutoff)?;
            s.displace(0, Complex64::new(-1.0 + 2.0 * k as f64 / count as f64, 0.0))?;
            Ok(s)
        })
        .collect::<Result<Vec<_>, cvqgan::fock::FockError>>()?;

    let start = Instant::now();
    let singles = states
        .iter()
        .map(|s| {
            let mut s = s.clone();
            stack.apply(&mut s).map(|_| s)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let one_by_one = start.elapsed();

    let start = Instant::now();
    let mut batch = FockBatch::from_states(&states)?;
    stack.apply_batch(&mut batch)?;
    let batched = start.elapsed();

    let diff = singles
        .iter()
        .enumerate()
        .map(|(b, s)| batch.state(b).max_abs_diff(s))
        .fold(0.0, f64::max);
    println!("{count} states, {depth} layers, cutoff {cutoff}");
    println!("one by one: {one_by_one:?}, batched: {batched:?}, max difference {diff:.1e}");
    println!("first <x> on mode 1: {:.6}", batch.expectation_x(1)?[0]);
    Ok(())
}

//! The Kerr gate only adds number-dependent phases: photon statistics stay
//! put while the quadrature mean moves.

use num_complex::Complex64;

use cvqgan::fock::{FockState, Gate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut state = FockState::vacuum(1, 20)?;
    state.apply(&Gate::Displacement {
        mode: 0,
        alpha: Complex64::new(1.0, 0.0),
    })?;
    let before = state.photon_distribution(0)?;
    println!("kappa   <x>       max |dP(n)|");
    for kappa in [0.0, 0.1, 0.2, 0.4] {
        let mut s = state.clone();
        s.kerr(0, kappa)?;
        let drift = before
            .iter()
            .zip(s.photon_distribution(0)?)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("{kappa:<7} {:<9.5} {drift:.1e}", s.expectation_x(0)?);
    }
    Ok(())
}

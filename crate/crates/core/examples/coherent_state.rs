//! Displaced vacuum: position mean and Poisson photon statistics.
//!
//! ```text
//! cargo run --example coherent_state
//! ```

use num_complex::Complex64;

use cvqgan::fock::FockState;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cutoff = 20;
    for alpha in [Complex64::new(0.5, 0.0), Complex64::new(0.7, 0.3), Complex64::new(-1.0, 0.5)] {
        let mut state = FockState::vacuum(1, cutoff)?;
        state.displace(0, alpha)?;
        let mean = alpha.norm_sqr();
        let mut poisson = (-mean).exp();
        println!("alpha = {alpha}: <x> = {:.12} (2 Re alpha = {})", state.expectation_x(0)?, 2.0 * alpha.re);
        for (n, p) in state.photon_distribution(0)?.iter().take(5).enumerate() {
            if n > 0 {
                poisson *= mean / n as f64;
            }
            println!("  P({n}) = {p:.10}  Poisson {poisson:.10}");
        }
    }
    Ok(())
}

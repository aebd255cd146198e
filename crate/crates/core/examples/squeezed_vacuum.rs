//! Squeezed vacuum variance against `e^{-2r}` and how the cutoff limits it.

use cvqgan::fock::FockState;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>5} {:>8} {:>12} {:>12} {:>12}", "r", "cutoff", "Var(x)", "e^-2r", "error");
    for r in [0.1, 0.3, 0.5, 0.8] {
        for cutoff in [10, 20, 40] {
            let mut state = FockState::vacuum(1, cutoff)?;
            state.squeeze(0, r, 0.0)?;
            let var = state.variance_x(0)?;
            let exact = (-2.0 * r).exp();
            println!("{r:>5} {cutoff:>8} {var:>12.8} {exact:>12.8} {:>12.2e}", (var - exact).abs());
        }
    }
    Ok(())
}

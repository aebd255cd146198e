//! Beamsplitter interference: a single photon splits evenly on a 50:50
//! splitter, while two photons bunch (the Hong-Ou-Mandel dip).

use std::f64::consts::FRAC_PI_4;

use cvqgan::fock::FockState;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cutoff = 4;

    let mut one = FockState::product_number_state(cutoff, &[1, 0])?;
    one.beamsplit(0, 1, FRAC_PI_4, 0.0)?;
    println!("|1,0> -> P(mode 0 has n): {:?}", one.photon_distribution(0)?);

    let mut two = FockState::product_number_state(cutoff, &[1, 1])?;
    two.beamsplit(0, 1, FRAC_PI_4, 0.0)?;
    let coincidence = two.amplitudes()[two.encode(&[1, 1])].norm_sqr();
    println!("|1,1> -> P(1,1) = {coincidence:.2e}");
    println!("        P(2,0) = {:.6}", two.amplitudes()[two.encode(&[2, 0])].norm_sqr());
    println!("        P(0,2) = {:.6}", two.amplitudes()[two.encode(&[0, 2])].norm_sqr());
    println!("norm after both gates: {:.15}", two.norm());
    Ok(())
}

//! Hybrid GAN: circuit generator, classical discriminator, on synthetic showers.
//!
//! Optional arguments: epochs (default 100) and seed (default 0).

use std::f64::consts::LN_2;

use cvqgan::calo::{mean_image, normalize, synth_dataset};
use cvqgan::engine::{train, GanConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let epochs = args.next().map_or(Ok(100), |a| a.parse())?;
    let seed = args.next().map_or(Ok(0), |a| a.parse())?;

    let (data, _) = normalize(&synth_dataset(1000, 0.1, 7)?)?;
    let config = GanConfig {
        gen_depth: 3,
        batch_size: 32,
        classical_learning_rate: 0.01,
        epochs,
        rng_seed: seed,
        ..GanConfig::default()
    };
    let run = train(&config, &data)?;
    for e in run.epochs.iter().step_by((epochs / 8).max(1)) {
        println!(
            "epoch {:3}  gen {:.3}  disc {:.3}  mean image {:.3?}",
            e.epoch, e.gen_loss, e.disc_loss, e.mean_image
        );
    }
    println!("equilibrium: gen ln2 = {LN_2:.3}, disc 2 ln2 = {:.3}", 2.0 * LN_2);
    println!("dataset mean   {:.3?}", mean_image(&data));
    println!("generated mean {:.3?}", mean_image(&run.samples));
    Ok(())
}

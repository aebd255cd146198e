//! Fully quantum GAN: the discriminator circuit acts on the generator's
//! output state directly and is read out as `sigmoid(<x>)` on the last mode.

use cvqgan::calo::{normalize, synth_dataset};
use cvqgan::engine::{
    encode_real_sample, generator_state, quantum_discriminate, train, Architecture, DiscriminatorParams, GanConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epochs = std::env::args().nth(1).map_or(Ok(10), |a| a.parse())?;
    let (data, _) = normalize(&synth_dataset(200, 0.1, 7)?)?;
    let config = GanConfig {
        architecture: Architecture::FullyQuantum,
        gen_depth: 3,
        cutoff: 6,
        epochs,
        ..GanConfig::default()
    };
    let run = train(&config, &data)?;
    for e in &run.epochs {
        println!(
            "epoch {:2}  gen {:.4}  disc {:.4}  labels real {:.3} fake {:.3}",
            e.epoch, e.gen_loss, e.disc_loss, e.mean_real_label, e.mean_fake_label
        );
    }

    let gen = run.generator_params()?;
    let DiscriminatorParams::Quantum(file) = &run.discriminator else {
        unreachable!("fully quantum runs carry a circuit discriminator")
    };
    let disc = file.clone().try_into()?;
    let fake = generator_state(&gen, &[0.3], &config)?;
    println!("label of an unmeasured generator state: {:.6}", quantum_discriminate(&fake, &disc, &config)?);
    let real = encode_real_sample(data[0].pixels(), &config)?;
    println!("label of an encoded real sample:        {:.6}", quantum_discriminate(&real, &disc, &config)?);
    Ok(())
}

//! Diversity ratio of generated against real samples and the collapse flag.

use cvqgan::calo::{normalize, synth_dataset, ImageSample};
use cvqgan::engine::diversity;
use cvqgan::experiment::evaluate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (real, _) = normalize(&synth_dataset(500, 0.1, 7)?)?;
    println!("real diversity {:.4}", diversity(&real)?);

    let collapsed = vec![ImageSample(vec![0.15, 0.45, 0.25]); 100];
    let narrow: Vec<ImageSample> = (0..100)
        .map(|k| ImageSample(vec![0.15, 0.45 + 0.001 * (k % 5) as f64, 0.25]))
        .collect();
    for (name, generated) in [("identical", &collapsed), ("narrow", &narrow), ("real copy", &real)] {
        let report = evaluate(generated, &real)?;
        println!(
            "{name:>10}: ratio {:.4}, collapse {}, mae {:.4}",
            report.diversity_ratio, report.mode_collapse, report.mae
        );
    }
    Ok(())
}

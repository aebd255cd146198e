//! Synthetic calorimeter showers: reduce 25x25 grids to three pixels,
//! normalize, and round-trip through CSV.

use cvqgan::calo::{load_dataset, mean_image, normalize, reduce, save_dataset, synth_dataset, DataFormat, RawImage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // flat across the transverse direction, stepped along the shower
    let grid = (0..625)
        .map(|i| match i % 25 {
            0..8 => 0.2,
            8..17 => 1.0,
            _ => 0.5,
        })
        .collect();
    let reduced = reduce(&RawImage::new(grid)?);
    println!("a stepped 25x25 profile reduces to {:?}", reduced.pixels());

    let data = synth_dataset(1000, 0.1, 7)?;
    let (scaled, scale) = normalize(&data)?;
    println!("raw mean {:.4?}, max pixel {:.4}", mean_image(&data), scale.max);
    println!("normalized mean {:.4?}", mean_image(&scaled));
    let second_peak = scaled.iter().filter(|s| s.argmax() == 2).count();
    println!("{second_peak} of {} samples peak in the last pixel", scaled.len());

    let dir = std::env::temp_dir().join("cvqgan-calorimeter-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("synth.csv");
    save_dataset(&path, &scaled)?;
    assert_eq!(load_dataset(&path, DataFormat::Reduced)?, scaled);
    println!("wrote and reloaded {}", path.display());
    Ok(())
}

//! Calorimeter-style images: 25x25 energy grids reduced to 3-pixel profiles,
//! a synthetic stand-in dataset, normalization, and CSV I/O.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Side length of a raw calorimeter image.
pub const GRID_SIZE: usize = 25;
/// Number of pixels after reduction.
pub const PIXELS: usize = 3;
/// Averaging runs over the first grid index (rows), leaving one value per column.
pub const LONGITUDINAL_AXIS: usize = 0;
/// Contiguous column bins `0..8`, `8..17`, `17..25`.
pub const BINS: [std::ops::Range<usize>; PIXELS] = [0..8, 8..17, 17..25];

/// Templates of the synthetic stand-in: dominant peak at pixel 1, or the
/// occasional peak at pixel 2.
pub const TEMPLATE_PEAK1: [f64; PIXELS] = [0.3, 1.0, 0.45];
pub const TEMPLATE_PEAK2: [f64; PIXELS] = [0.3, 0.45, 1.0];
pub const ENERGY_SIGMA: f64 = 0.25;
pub const PIXEL_JITTER: f64 = 0.08;
pub const DEFAULT_PEAK2_FRACTION: f64 = 0.1;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: expected {expected} values, found {found}")]
    Arity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse {token:?} as a number")]
    Parse { line: usize, token: String },
    #[error("line {line}, column {column}: energy {value} is negative")]
    Negative {
        line: usize,
        column: usize,
        value: f64,
    },
    #[error("line {line}, column {column}: energy is not finite")]
    NonFinite { line: usize, column: usize },
    #[error("raw image needs {expected} values, got {found}")]
    GridSize { expected: usize, found: usize },
    #[error("dataset is empty")]
    Empty,
    #[error("dataset is all zeros; cannot normalize")]
    AllZero,
    #[error("peak-2 fraction {0} is outside [0, 1]")]
    Fraction(f64),
    #[error("unknown dataset format {0:?} (expected raw25 or reduced)")]
    UnknownFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// One 25x25 energy deposition grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RawImage {
    grid: Vec<f64>,
}

impl RawImage {
    pub fn new(grid: Vec<f64>) -> Result<Self, DataError> {
        if grid.len() != GRID_SIZE * GRID_SIZE {
            return Err(DataError::GridSize {
                expected: GRID_SIZE * GRID_SIZE,
                found: grid.len(),
            });
        }
        check_energies(0, &grid)?;
        Ok(Self { grid })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.grid[row * GRID_SIZE + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.grid
    }
}

/// Reduced image: one energy per pixel. Real data is non-negative; generated
/// samples may not be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImageSample(pub Vec<f64>);

impl ImageSample {
    pub fn pixels(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest pixel (first on ties).
    pub fn argmax(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
            .0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl From<Vec<f64>> for ImageSample {
    fn from(v: Vec<f64>) -> Self {
        ImageSample(v)
    }
}

/// Column profile averaged along the longitudinal axis, then averaged into the 3 bins.
pub fn reduce(raw: &RawImage) -> ImageSample {
    let profile: Vec<f64> = (0..GRID_SIZE)
        .map(|col| (0..GRID_SIZE).map(|row| raw.get(row, col)).sum::<f64>() / GRID_SIZE as f64)
        .collect();
    ImageSample(
        BINS.iter()
            .map(|bin| profile[bin.clone()].iter().sum::<f64>() / bin.len() as f64)
            .collect(),
    )
}

/// Per-pixel mean of a dataset.
pub fn mean_image(data: &[ImageSample]) -> Vec<f64> {
    let Some(first) = data.first() else {
        return Vec::new();
    };
    let mut mean = vec![0.0; first.len()];
    for s in data {
        for (m, v) in mean.iter_mut().zip(s.pixels()) {
            *m += v;
        }
    }
    let n = data.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// Scale applied by [`normalize`]; `normalized = raw / max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub max: f64,
}

impl ScaleRecord {
    pub fn denormalize(&self, data: &[ImageSample]) -> Vec<ImageSample> {
        data.iter()
            .map(|s| ImageSample(s.pixels().iter().map(|v| v * self.max).collect()))
            .collect()
    }
}

/// Divides every pixel by the dataset-wide maximum.
pub fn normalize(data: &[ImageSample]) -> Result<(Vec<ImageSample>, ScaleRecord), DataError> {
    if data.is_empty() {
        return Err(DataError::Empty);
    }
    let max = data
        .iter()
        .flat_map(|s| s.pixels().iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    if max <= 0.0 {
        return Err(DataError::AllZero);
    }
    let scaled = data
        .iter()
        .map(|s| ImageSample(s.pixels().iter().map(|v| v / max).collect()))
        .collect();
    Ok((scaled, ScaleRecord { max }))
}

/// Synthetic stand-in: a template with its peak at pixel 1 (or at pixel 2 with
/// probability `peak2_fraction`), scaled by a log-normal energy and jittered
/// per pixel, clamped at zero.
pub fn synth_dataset(n: usize, peak2_fraction: f64, seed: u64) -> Result<Vec<ImageSample>, DataError> {
    if !(0.0..=1.0).contains(&peak2_fraction) {
        return Err(DataError::Fraction(peak2_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let energy = LogNormal::new(0.0, ENERGY_SIGMA).expect("valid sigma");
    let jitter = Normal::new(0.0, PIXEL_JITTER).expect("valid sigma");
    Ok((0..n)
        .map(|_| {
            let template = if rng.random::<f64>() < peak2_fraction {
                TEMPLATE_PEAK2
            } else {
                TEMPLATE_PEAK1
            };
            let e = energy.sample(&mut rng);
            ImageSample(
                template
                    .iter()
                    .map(|t| (t * e * (1.0 + jitter.sample(&mut rng))).max(0.0))
                    .collect(),
            )
        })
        .collect())
}

/// On-disk dataset layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    /// 625 comma-separated values per line, one 25x25 grid (row-major).
    Raw25,
    /// 3 comma-separated values per line.
    Reduced,
}

impl std::str::FromStr for DataFormat {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, DataError> {
        match s {
            "raw25" => Ok(DataFormat::Raw25),
            "reduced" => Ok(DataFormat::Reduced),
            other => Err(DataError::UnknownFormat(other.to_string())),
        }
    }
}

/// Sidecar metadata written next to a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub n: usize,
    pub format: DataFormat,
    pub scale_record: Option<ScaleRecord>,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak2_fraction: Option<f64>,
}

fn check_energies(line: usize, values: &[f64]) -> Result<(), DataError> {
    for (column, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(DataError::NonFinite { line, column });
        }
        if value < 0.0 {
            return Err(DataError::Negative {
                line,
                column,
                value,
            });
        }
    }
    Ok(())
}

/// Parses CSV text in `format`; raw grids are reduced on the way in.
pub fn parse_dataset(text: &str, format: DataFormat) -> Result<Vec<ImageSample>, DataError> {
    let arity = match format {
        DataFormat::Raw25 => GRID_SIZE * GRID_SIZE,
        DataFormat::Reduced => PIXELS,
    };
    let mut out = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let values = trimmed
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| DataError::Parse {
                    line,
                    token: tok.trim().to_string(),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if values.len() != arity {
            return Err(DataError::Arity {
                line,
                expected: arity,
                found: values.len(),
            });
        }
        check_energies(line, &values)?;
        out.push(match format {
            DataFormat::Raw25 => reduce(&RawImage { grid: values }),
            DataFormat::Reduced => ImageSample(values),
        });
    }
    if out.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(out)
}

pub fn load_dataset(path: &Path, format: DataFormat) -> Result<Vec<ImageSample>, DataError> {
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text, format)
}

/// Reduced CSV with 17 significant digits per value.
pub fn format_dataset(data: &[ImageSample]) -> String {
    let mut out = String::new();
    for s in data {
        for (i, v) in s.pixels().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn save_dataset(path: &Path, data: &[ImageSample]) -> Result<(), DataError> {
    fs::write(path, format_dataset(data)).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn grid(f: impl Fn(usize, usize) -> f64) -> RawImage {
        let mut g = Vec::with_capacity(625);
        for r in 0..GRID_SIZE {
            for c in 0..GRID_SIZE {
                g.push(f(r, c));
            }
        }
        RawImage::new(g).unwrap()
    }

    #[test]
    fn reduce_constant_grid() {
        let s = reduce(&grid(|_, _| 2.5));
        for v in s.pixels() {
            assert!((v - 2.5).abs() < 1e-15);
        }
    }

    #[test]
    fn reduce_middle_column() {
        let s = reduce(&grid(|_, c| if c == 12 { 1.0 } else { 0.0 }));
        assert_eq!(s.pixels()[0], 0.0);
        assert_eq!(s.pixels()[2], 0.0);
        // column mean 1.0, averaged over the 9-wide middle bin
        assert!((s.pixels()[1] - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn reduce_averages_rows_not_columns() {
        // energy only in row 0: every column mean is 1/25
        let s = reduce(&grid(|r, _| if r == 0 { 1.0 } else { 0.0 }));
        for v in s.pixels() {
            assert!((v - 1.0 / 25.0).abs() < 1e-15);
        }
        assert_eq!(LONGITUDINAL_AXIS, 0);
    }

    #[test]
    fn raw_image_validation() {
        assert!(matches!(RawImage::new(vec![0.0; 624]), Err(DataError::GridSize { .. })));
        let mut g = vec![0.0; 625];
        g[3] = -1.0;
        assert!(matches!(RawImage::new(g), Err(DataError::Negative { column: 3, .. })));
    }

    #[test]
    fn normalize_and_invert() {
        let data = synth_dataset(50, 0.1, 3).unwrap();
        let (norm, scale) = normalize(&data).unwrap();
        let max = norm.iter().flat_map(|s| s.pixels().iter().copied()).fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        for (a, b) in scale.denormalize(&norm).iter().zip(&data) {
            for (x, y) in a.pixels().iter().zip(b.pixels()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        let json = serde_json::to_string(&scale).unwrap();
        assert_eq!(serde_json::from_str::<ScaleRecord>(&json).unwrap(), scale);
    }

    #[test]
    fn normalize_errors() {
        assert!(matches!(normalize(&[]), Err(DataError::Empty)));
        assert!(matches!(normalize(&[ImageSample(vec![0.0; 3])]), Err(DataError::AllZero)));
    }

    #[test]
    fn normalize_is_idempotent() {
        let (once, _) = normalize(&synth_dataset(20, 0.2, 1).unwrap()).unwrap();
        let (twice, scale) = normalize(&once).unwrap();
        assert_eq!(scale.max, 1.0);
        assert_eq!(once, twice);
    }

    #[test]
    fn synth_without_peak2() {
        let data = synth_dataset(500, 0.0, 4).unwrap();
        assert!(data.iter().all(|s| s.argmax() == 1));
    }

    #[test]
    fn synth_peak2_share() {
        let data = synth_dataset(10_000, 0.1, 5).unwrap();
        let share = data.iter().filter(|s| s.argmax() == 2).count() as f64 / 1e4;
        assert!((share - 0.1).abs() <= 0.02, "{share}");
    }

    #[test]
    fn synth_is_seeded_and_nonnegative() {
        let a = synth_dataset(300, 0.3, 9).unwrap();
        assert_eq!(a, synth_dataset(300, 0.3, 9).unwrap());
        assert_ne!(a, synth_dataset(300, 0.3, 10).unwrap());
        assert!(a.iter().all(|s| s.min() >= 0.0));
        assert!(matches!(synth_dataset(3, 1.5, 0), Err(DataError::Fraction(_))));
    }

    #[test]
    fn synth_mean_peaks_at_pixel_one() {
        let data = synth_dataset(2000, 0.4, 6).unwrap();
        assert_eq!(ImageSample(mean_image(&data)).argmax(), 1);
    }

    #[test]
    fn parse_errors_name_lines() {
        let short = format!("1,2,3\n{}\n", vec!["0"; 624].join(","));
        match parse_dataset(&short, DataFormat::Raw25) {
            Err(DataError::Arity { line: 1, expected: 625, found: 3 }) => {}
            other => panic!("{other:?}"),
        }
        match parse_dataset("0.1,0.2,0.3\n0.1,0.2\n", DataFormat::Reduced) {
            Err(DataError::Arity { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_dataset("0.1,-0.2,0.3\n", DataFormat::Reduced) {
            Err(DataError::Negative { line: 1, column: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_dataset("0.1,x,0.3\n", DataFormat::Reduced), Err(DataError::Parse { line: 1, .. })));
        assert!(matches!(parse_dataset("\n\n", DataFormat::Reduced), Err(DataError::Empty)));
    }

    #[test]
    fn raw25_lines_are_reduced() {
        let line = vec!["2"; 625].join(",");
        let data = parse_dataset(&line, DataFormat::Raw25).unwrap();
        assert_eq!(data, vec![ImageSample(vec![2.0, 2.0, 2.0])]);
    }

    #[test]
    fn save_load_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let data = synth_dataset(100, 0.1, 2).unwrap();
        save_dataset(&path, &data).unwrap();
        assert_eq!(load_dataset(&path, DataFormat::Reduced).unwrap(), data);
        assert!(matches!(
            load_dataset(&dir.path().join("missing.csv"), DataFormat::Reduced),
            Err(DataError::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(values in proptest::collection::vec(0.0f64..1e6, 3..30)) {
            let data: Vec<ImageSample> = values.chunks_exact(3).map(|c| ImageSample(c.to_vec())).collect();
            prop_assume!(!data.is_empty());
            let back = parse_dataset(&format_dataset(&data), DataFormat::Reduced).unwrap();
            prop_assert_eq!(back, data);
        }

        #[test]
        fn reduce_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..625).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = (0..625).map(|_| rng.random::<f64>()).collect();
            let rx = reduce(&RawImage { grid: x.clone() });
            let ry = reduce(&RawImage { grid: y.clone() });
            let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let rc = reduce(&RawImage { grid: combo });
            for i in 0..3 {
                prop_assert!((rc.pixels()[i] - (a * rx.pixels()[i] + b * ry.pixels()[i])).abs() < 1e-12);
            }
        }

        #[test]
        fn reduce_ignores_order_within_a_bin(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..625).map(|_| rng.random::<f64>()).collect();
            // swap columns 9 and 15 (both in the middle bin), and two rows
            let mut y = x.clone();
            for r in 0..25 {
                y.swap(r * 25 + 9, r * 25 + 15);
            }
            for c in 0..25 {
                y.swap(c, 24 * 25 + c);
            }
            let (rx, ry) = (reduce(&RawImage { grid: x }), reduce(&RawImage { grid: y }));
            for i in 0..3 {
                prop_assert!((rx.pixels()[i] - ry.pixels()[i]).abs() < 1e-14);
            }
        }
    }
}

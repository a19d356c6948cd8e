//! Delentropy, mean and median spatial frequency, perimetric complexity,
//! and their per-dataset aggregation.

mod perimeter;
mod report;

pub use perimeter::{contour_length, perimetric_complexity};
pub(crate) use report::csv_field as report_csv_field;
pub use report::{complexity_report, measure_pair, ComplexityMeasures, ComplexityReport, ImageComplexity};

use crate::raster::GrayImage;
use crate::spectra::PowerSpectrum;
use crate::{Error, Result};

/// Quantization levels applied before differentiation.
pub const LEVELS: i32 = 256;
/// Largest representable gradient component, in quantized levels.
pub const HALF_RANGE: usize = (LEVELS - 1) as usize;
const SIDE: usize = 2 * HALF_RANGE + 1;

/// Joint histogram of per-pixel gradient pairs `(fx, fy)`, normalized to a
/// probability density over the `(2G+1)²` integer grid with `G = 255`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deldensity {
    counts: Vec<u64>,
    total: u64,
}

impl Deldensity {
    pub fn half_range(&self) -> usize {
        HALF_RANGE
    }

    pub fn pixel_count(&self) -> u64 {
        self.total
    }

    #[inline]
    fn index(fx: i32, fy: i32) -> usize {
        let g = HALF_RANGE as i32;
        ((fy + g) as usize) * SIDE + (fx + g) as usize
    }

    pub fn count(&self, fx: i32, fy: i32) -> u64 {
        let g = HALF_RANGE as i32;
        if fx.abs() > g || fy.abs() > g {
            return 0;
        }
        self.counts[Self::index(fx, fy)]
    }

    pub fn probability(&self, fx: i32, fy: i32) -> f64 {
        self.count(fx, fy) as f64 / self.total as f64
    }

    /// Non-empty bins as `(fx, fy, probability)`, in row-major grid order.
    pub fn nonzero(&self) -> impl Iterator<Item = (i32, i32, f64)> + '_ {
        let g = HALF_RANGE as i32;
        let total = self.total as f64;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| ((i % SIDE) as i32 - g, (i / SIDE) as i32 - g, c as f64 / total))
    }

    /// `-½ Σ p log₂ p`, divided by its value for a uniform deldensity
    /// (`½ log₂((2G+1)²)`), so the result lies in `[0, 1]`.
    pub fn entropy(&self) -> f64 {
        let raw: f64 = self.nonzero().map(|(_, _, p)| -p * p.log2()).sum::<f64>() * 0.5;
        let ceiling = 0.5 * ((SIDE * SIDE) as f64).log2();
        // single-bin densities give -0.0
        (raw / ceiling).max(0.0)
    }
}

#[inline]
pub(crate) fn quantize(v: f64) -> i32 {
    (v * f64::from(LEVELS - 1)).round() as i32
}

/// Central difference `(b - a) / 2` rounded half away from zero.
#[inline]
pub(crate) fn half_difference(a: i32, b: i32) -> i32 {
    let d = b - a;
    if d >= 0 {
        (d + 1) / 2
    } else {
        -((-d + 1) / 2)
    }
}

/// Builds the deldensity of `image`: intensities quantized to 256 levels,
/// central-difference gradients with replicated edges.
pub fn deldensity(image: &GrayImage) -> Result<Deldensity> {
    let (w, h) = (image.width(), image.height());
    if w < 2 || h < 2 {
        return Err(Error::InvalidParameter(format!("deldensity needs at least a 2x2 image, got {w}x{h}")));
    }
    let q: Vec<i32> = image.data().iter().map(|&v| quantize(v)).collect();
    let mut counts = vec![0u64; SIDE * SIDE];
    for y in 0..h {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(h - 1);
        for x in 0..w {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(w - 1);
            let fx = half_difference(q[y * w + left], q[y * w + right]);
            let fy = half_difference(q[up * w + x], q[down * w + x]);
            counts[Deldensity::index(fx, fy)] += 1;
        }
    }
    Ok(Deldensity { counts, total: (w * h) as u64 })
}

pub fn delentropy(image: &GrayImage) -> Result<f64> {
    Ok(deldensity(image)?.entropy())
}

/// Power-weighted mean of the bin centers; `None` for a zero-power spectrum.
pub fn mnf(spectrum: &PowerSpectrum) -> Option<f64> {
    let total = spectrum.total_power();
    if spectrum.is_degenerate() || total.is_nan() || total <= 0.0 {
        return None;
    }
    let weighted: f64 = spectrum.bin_center().iter().zip(spectrum.power()).map(|(f, p)| f * p).sum();
    Some(weighted / total)
}

/// Smallest bin center whose cumulative power reaches half the total.
pub fn mdf(spectrum: &PowerSpectrum) -> Option<f64> {
    let total = spectrum.total_power();
    if spectrum.is_degenerate() || total.is_nan() || total <= 0.0 {
        return None;
    }
    let mut cumulative = 0.0;
    for (f, p) in spectrum.bin_center().iter().zip(spectrum.power()) {
        cumulative += p;
        if 2.0 * cumulative >= total {
            return Some(*f);
        }
    }
    spectrum.bin_center().last().copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::synth;
    use std::collections::HashMap;

    fn brute_force_histogram(image: &GrayImage) -> HashMap<(i32, i32), u64> {
        let (w, h) = (image.width() as i64, image.height() as i64);
        let level = |x: i64, y: i64| -> i64 {
            let x = x.clamp(0, w - 1) as usize;
            let y = y.clamp(0, h - 1) as usize;
            (image.get(x, y) * 255.0).round() as i64
        };
        let half = |d: i64| -> i32 { ((d as f64) / 2.0).round() as i32 };
        let mut hist = HashMap::new();
        for y in 0..h {
            for x in 0..w {
                let fx = half(level(x + 1, y) - level(x - 1, y));
                let fy = half(level(x, y + 1) - level(x, y - 1));
                *hist.entry((fx, fy)).or_insert(0) += 1;
            }
        }
        hist
    }

    #[test]
    fn constant_image_single_bin() {
        let d = deldensity(&GrayImage::constant(5, 4, 0.6).unwrap()).unwrap();
        assert_eq!(d.probability(0, 0), 1.0);
        assert_eq!(d.nonzero().count(), 1);
        assert_eq!(d.entropy(), 0.0);
    }

    #[test]
    fn unit_slope_ramp_single_bin() {
        let ramp = GrayImage::from_fn(256, 8, |x, _| x as f64 / 255.0).unwrap();
        let d = deldensity(&ramp).unwrap();
        assert_eq!(d.probability(1, 0), 1.0);
        assert_eq!(delentropy(&ramp).unwrap(), 0.0);
    }

    #[test]
    fn histogram_matches_brute_force() {
        for seed in 0..5 {
            let img = synth::noise(23, 17, seed).unwrap();
            let d = deldensity(&img).unwrap();
            let oracle = brute_force_histogram(&img);
            assert_eq!(d.nonzero().count(), oracle.len());
            for ((fx, fy), &c) in &oracle {
                assert_eq!(d.count(*fx, *fy), c);
            }
            let sum: f64 = d.nonzero().map(|(_, _, p)| p).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_delentropy_matches_scalar_recomputation() {
        let img = synth::noise(256, 256, 1).unwrap();
        let oracle = brute_force_histogram(&img);
        let n = 256.0 * 256.0;
        let h: f64 = oracle.values().map(|&c| c as f64 / n).map(|p| -0.5 * p * p.log2()).sum();
        let expected = h / (0.5 * (511.0f64 * 511.0).log2());
        let got = delentropy(&img).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert!(got > 0.0 && got <= 1.0);
    }

    #[test]
    fn delentropy_rotation_invariant() {
        let img = synth::noise(31, 20, 4).unwrap();
        let de = delentropy(&img).unwrap();
        assert!((de - delentropy(&img.transpose()).unwrap()).abs() < 1e-9);
        assert!((de - delentropy(&img.rotate90()).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn half_difference_rounds_away_from_zero() {
        assert_eq!(half_difference(0, 1), 1);
        assert_eq!(half_difference(1, 0), -1);
        assert_eq!(half_difference(0, 2), 1);
        assert_eq!(half_difference(0, 255), 128);
        assert_eq!(half_difference(255, 0), -128);
    }

    fn spectrum(f: &[f64], p: &[f64]) -> PowerSpectrum {
        PowerSpectrum::new(f.to_vec(), p.to_vec()).unwrap()
    }

    #[test]
    fn frequency_centroid_and_median() {
        assert_eq!(mnf(&spectrum(&[0.1, 0.2, 0.3], &[0.0, 5.0, 0.0])), Some(0.2));
        assert!((mnf(&spectrum(&[0.1, 0.2, 0.3], &[1.0, 0.0, 1.0])).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(mdf(&spectrum(&[0.1, 0.35, 0.4], &[0.0, 3.0, 0.0])), Some(0.35));
        assert_eq!(mdf(&spectrum(&[0.1, 0.2, 0.3], &[1.0, 1.0, 2.0])), Some(0.2));
        let zero = spectrum(&[0.1, 0.2], &[0.0, 0.0]);
        assert_eq!(mnf(&zero), None);
        assert_eq!(mdf(&zero), None);
    }

    #[test]
    fn frequency_statistics_match_scan_oracles() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let m = rng.random_range(1..40usize);
            let f: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * 0.5 / m as f64).collect();
            let p: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            let s = spectrum(&f, &p);
            let total: f64 = p.iter().sum();
            let centroid = f.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>() / total;
            assert!((mnf(&s).unwrap() - centroid).abs() < 1e-15);
            let mut median = f[m - 1];
            for i in 0..m {
                if p[..=i].iter().sum::<f64>() * 2.0 >= total {
                    median = f[i];
                    break;
                }
            }
            assert_eq!(mdf(&s).unwrap(), median);
            let (lo, hi) = (f[0], f[m - 1]);
            assert!(mnf(&s).unwrap() >= lo - 1e-15 && mnf(&s).unwrap() <= hi + 1e-15);
            assert!(mdf(&s).unwrap() >= lo && mdf(&s).unwrap() <= hi);
        }
    }
}

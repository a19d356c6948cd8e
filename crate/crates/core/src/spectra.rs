//! 2-D Fourier analysis: forward/inverse transforms, the radially binned
//! power spectrum, and an ideal low-pass filter.
//!
//! Transforms run at the raw image size; rustfft handles arbitrary lengths
//! (mixed radix with Rader/Bluestein fallbacks for large primes).

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::format::NumberStyle;
use crate::raster::GrayImage;
use crate::{Error, Result};

pub const DEFAULT_BINS: usize = 256;

/// Unnormalized 2-D spectrum, row-major with `v` (vertical frequency) as the
/// row index and `u` as the column index.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub width: usize,
    pub height: usize,
    pub data: Vec<Complex64>,
}

impl FrequencyGrid {
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.data[v * self.width + u]
    }

    /// Inverse transform with the `1/(WH)` scaling; returns real parts.
    pub fn inverse_real(mut self) -> Vec<f64> {
        fft2(&mut self.data, self.width, self.height, FftDirection::Inverse);
        let scale = 1.0 / (self.width * self.height) as f64;
        self.data.iter().map(|c| c.re * scale).collect()
    }
}

/// Signed frequency of index `k` on an `n`-point axis, in cycles per sample.
#[inline]
pub fn normalized_frequency(k: usize, n: usize) -> f64 {
    let signed = if 2 * k <= n { k as f64 } else { k as f64 - n as f64 };
    signed / n as f64
}

pub fn dft2(image: &GrayImage) -> FrequencyGrid {
    let mut data: Vec<Complex64> = image.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut data, image.width(), image.height(), FftDirection::Forward);
    FrequencyGrid { width: image.width(), height: image.height(), data }
}

fn fft2(data: &mut [Complex64], width: usize, height: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(width, direction);
    transform_rows(data, width, &row_fft);
    if height > 1 {
        let col_fft = planner.plan_fft(height, direction);
        let mut transposed = transpose(data, width, height);
        transform_rows(&mut transposed, height, &col_fft);
        let back = transpose(&transposed, height, width);
        data.copy_from_slice(&back);
    }
}

fn transform_rows(data: &mut [Complex64], len: usize, fft: &Arc<dyn Fft<f64>>) {
    if len == 1 {
        return;
    }
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(len).for_each_init(
        || vec![Complex64::default(); scratch_len],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

fn transpose(data: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    out.par_chunks_mut(height).enumerate().for_each(|(x, col)| {
        for (y, c) in col.iter_mut().enumerate() {
            *c = data[y * width + x];
        }
    });
    out
}

/// Radially binned power spectrum over normalized frequencies `(0, 0.5]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    bin_center: Vec<f64>,
    power: Vec<f64>,
    degenerate: bool,
}

impl PowerSpectrum {
    /// Spectrum from explicit bins. Centers must be strictly increasing in
    /// `(0, 0.5]` and powers finite and non-negative.
    pub fn new(bin_center: Vec<f64>, power: Vec<f64>) -> Result<Self> {
        if bin_center.is_empty() || bin_center.len() != power.len() {
            return Err(Error::InvalidParameter("spectrum needs equal, non-zero numbers of centers and powers".into()));
        }
        if bin_center.iter().any(|&f| !(f > 0.0 && f <= 0.5)) || bin_center.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("bin centers must increase strictly within (0, 0.5]".into()));
        }
        if power.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
            return Err(Error::InvalidParameter("powers must be finite and non-negative".into()));
        }
        let degenerate = power.iter().all(|&p| p == 0.0);
        Ok(Self { bin_center, power, degenerate })
    }

    pub fn bin_count(&self) -> usize {
        self.power.len()
    }

    pub fn bin_center(&self) -> &[f64] {
        &self.bin_center
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// True when the source image was constant (or all bins are empty);
    /// frequency statistics are undefined for such spectra.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn to_csv(&self, style: NumberStyle) -> String {
        let mut out = String::from("bin_center,power\n");
        for (f, p) in self.bin_center.iter().zip(&self.power) {
            out.push_str(&style.number(*f));
            out.push(',');
            out.push_str(&style.number(*p));
            out.push('\n');
        }
        out
    }
}

fn bin_centers(bins: usize) -> Vec<f64> {
    let width = 0.5 / bins as f64;
    (0..bins).map(|i| (i as f64 + 0.5) * width).collect()
}

/// Bin `i` covers `(i, i+1] * 0.5/bins`.
#[inline]
fn bin_index(f: f64, bins: usize) -> usize {
    let scaled = (f * 2.0 * bins as f64).ceil() as usize;
    scaled.clamp(1, bins) - 1
}

/// Mean-subtracted power `|F(u,v)|²` accumulated by radial frequency
/// `sqrt((u/W)² + (v/H)²)`. DC and corner frequencies above 0.5 are dropped.
pub fn radial_power_spectrum(image: &GrayImage, bins: usize) -> Result<PowerSpectrum> {
    if bins == 0 {
        return Err(Error::InvalidParameter("bin count must be at least 1".into()));
    }
    let (width, height) = (image.width(), image.height());
    if width < 2 || height < 2 {
        return Err(Error::InvalidParameter(format!("spectrum needs at least a 2x2 image, got {width}x{height}")));
    }
    let centers = bin_centers(bins);
    let first = image.data()[0];
    if image.data().iter().all(|&v| v == first) {
        return Ok(PowerSpectrum { bin_center: centers, power: vec![0.0; bins], degenerate: true });
    }

    let mean = image.mean();
    let mut data: Vec<Complex64> = image.data().iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    fft2(&mut data, width, height, FftDirection::Forward);

    let fu: Vec<f64> = (0..width).map(|u| normalized_frequency(u, width)).collect();
    let mut power = vec![0.0; bins];
    for v in 0..height {
        let fv = normalized_frequency(v, height);
        let row = &data[v * width..(v + 1) * width];
        for (c, &fx) in row.iter().zip(&fu) {
            let f = (fx * fx + fv * fv).sqrt();
            if f == 0.0 || f > 0.5 {
                continue;
            }
            power[bin_index(f, bins)] += c.norm_sqr();
        }
    }
    let degenerate = power.iter().all(|&p| p == 0.0);
    Ok(PowerSpectrum { bin_center: centers, power, degenerate })
}

/// Ideal separable low-pass: zeroes every coefficient whose per-axis
/// frequency magnitude exceeds `cutoff`, inverts, clamps to `[0, 1]`.
pub fn lowpass(image: &GrayImage, cutoff: f64) -> Result<GrayImage> {
    if !(cutoff > 0.0 && cutoff <= 0.5) {
        return Err(Error::InvalidParameter(format!("low-pass cutoff {cutoff} outside (0, 0.5]")));
    }
    let (width, height) = (image.width(), image.height());
    let mut grid = dft2(image);
    let keep_u: Vec<bool> = (0..width).map(|u| normalized_frequency(u, width).abs() <= cutoff).collect();
    grid.data.par_chunks_mut(width).enumerate().for_each(|(v, row)| {
        let keep_row = normalized_frequency(v, height).abs() <= cutoff;
        for (c, &keep) in row.iter_mut().zip(&keep_u) {
            if !(keep && keep_row) {
                *c = Complex64::default();
            }
        }
    });
    Ok(GrayImage::from_unclamped(width, height, grid.inverse_real()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::synth;
    use std::f64::consts::TAU;

    fn naive_dft(image: &GrayImage) -> Vec<Complex64> {
        let (w, h) = (image.width(), image.height());
        let mut out = vec![Complex64::default(); w * h];
        for v in 0..h {
            for u in 0..w {
                let mut acc = Complex64::default();
                for y in 0..h {
                    for x in 0..w {
                        let phase = -TAU * ((u * x) as f64 / w as f64 + (v * y) as f64 / h as f64);
                        acc += Complex64::from_polar(image.get(x, y), phase);
                    }
                }
                out[v * w + u] = acc;
            }
        }
        out
    }

    /// Direct O(N³) transform of `image - offset`: row sums, then column sums.
    fn separable_naive_dft(image: &GrayImage, offset: f64) -> Vec<Complex64> {
        let (w, h) = (image.width(), image.height());
        let mut rows = vec![Complex64::default(); w * h];
        for y in 0..h {
            for u in 0..w {
                rows[y * w + u] = (0..w)
                    .map(|x| Complex64::from_polar(image.get(x, y) - offset, -TAU * ((u * x) % w) as f64 / w as f64))
                    .sum();
            }
        }
        let mut out = vec![Complex64::default(); w * h];
        for v in 0..h {
            for u in 0..w {
                out[v * w + u] = (0..h)
                    .map(|y| rows[y * w + u] * Complex64::from_polar(1.0, -TAU * ((v * y) % h) as f64 / h as f64))
                    .sum();
            }
        }
        out
    }

    #[test]
    fn constant_image_has_only_dc() {
        let img = GrayImage::constant(6, 5, 0.3).unwrap();
        let grid = dft2(&img);
        assert!((grid.get(0, 0).re - 0.3 * 30.0).abs() < 1e-10);
        for (i, c) in grid.data.iter().enumerate().skip(1) {
            assert!(c.norm() < 1e-10, "coefficient {i} = {c}");
        }
    }

    #[test]
    fn cosine_is_a_fourier_pair() {
        let w = 32;
        let img = GrayImage::from_fn(w, 8, |x, _| 0.5 + 0.5 * (TAU * 4.0 * x as f64 / w as f64).cos()).unwrap();
        let grid = dft2(&img);
        for v in 0..8 {
            for u in 0..w {
                let c = grid.get(u, v);
                let expected = match (u, v) {
                    (0, 0) => 0.5 * 256.0,
                    (4, 0) | (28, 0) => 0.25 * 256.0,
                    _ => 0.0,
                };
                assert!((c.re - expected).abs() < 1e-9 && c.im.abs() < 1e-9, "({u},{v}) = {c}");
            }
        }
    }

    #[test]
    fn matches_direct_dft_on_odd_sizes() {
        let img = synth::noise(7, 5, 3).unwrap();
        let fast = dft2(&img);
        for (a, b) in fast.data.iter().zip(naive_dft(&img)) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn parseval_on_random_8x8() {
        let img = synth::noise(8, 8, 5).unwrap();
        let spatial: f64 = img.data().iter().map(|v| v * v).sum();
        let freq: f64 = naive_dft(&img).iter().map(|c| c.norm_sqr()).sum::<f64>() / 64.0;
        let fast: f64 = dft2(&img).data.iter().map(|c| c.norm_sqr()).sum::<f64>() / 64.0;
        assert!((spatial - freq).abs() / spatial < 1e-9);
        assert!((spatial - fast).abs() / spatial < 1e-9);
    }

    #[test]
    fn inverse_recovers_image() {
        let img = synth::noise(13, 6, 9).unwrap();
        let back = dft2(&img).inverse_real();
        for (a, b) in img.data().iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_image_spectrum_is_degenerate() {
        let s = radial_power_spectrum(&GrayImage::constant(9, 9, 0.7).unwrap(), 16).unwrap();
        assert!(s.is_degenerate());
        assert!(s.power().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn single_tone_lands_in_one_bin() {
        let img = GrayImage::from_fn(64, 64, |x, _| 0.5 + 0.5 * (TAU * 8.0 * x as f64 / 64.0).cos()).unwrap();
        let s = radial_power_spectrum(&img, 32).unwrap();
        let total = s.total_power();
        let target = s.bin_center().iter().position(|&c| (c - 0.125).abs() <= 0.5 / 64.0).unwrap();
        assert_eq!(target, 7);
        assert!((s.power()[target] - total).abs() <= 1e-9 * total);
    }

    #[test]
    fn binned_power_matches_direct_summation() {
        let n = 128;
        let img = synth::noise(n, n, 17).unwrap();
        let s = radial_power_spectrum(&img, 64).unwrap();
        // Parseval total of the mean-subtracted image, minus DC (zero after
        // subtraction) minus the corner coefficients evaluated directly.
        let mean = img.mean();
        let parseval = (n * n) as f64 * img.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        let full = separable_naive_dft(&img, mean);
        let mut corners = 0.0;
        for v in 0..n {
            for u in 0..n {
                let (fu, fv) = (normalized_frequency(u, n), normalized_frequency(v, n));
                if (fu * fu + fv * fv).sqrt() > 0.5 {
                    corners += full[v * n + u].norm_sqr();
                }
            }
        }
        let expected = parseval - corners;
        assert!((s.total_power() - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn spectrum_ignores_intensity_offset() {
        let img = GrayImage::from_fn(20, 12, |x, y| 0.2 + 0.3 * ((x * 7 + y * 3) % 11) as f64 / 11.0).unwrap();
        let shifted = GrayImage::from_fn(20, 12, |x, y| img.get(x, y) + 0.25).unwrap();
        let (a, b) = (radial_power_spectrum(&img, 32).unwrap(), radial_power_spectrum(&shifted, 32).unwrap());
        for (p, q) in a.power().iter().zip(b.power()) {
            assert!((p - q).abs() <= 1e-12 * a.total_power());
        }
    }

    #[test]
    fn lowpass_half_is_identity() {
        let img = synth::noise(19, 11, 2).unwrap();
        let out = lowpass(&img, 0.5).unwrap();
        for (a, b) in img.data().iter().zip(out.data()) {
            assert!((a - b).abs() < 1e-10);
        }
        let flat = GrayImage::constant(10, 10, 0.4).unwrap();
        for (a, b) in flat.data().iter().zip(lowpass(&flat, 0.1).unwrap().data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lowpass_removes_tone_above_cutoff() {
        let img = GrayImage::from_fn(100, 10, |x, _| 0.5 + 0.4 * (TAU * 0.3 * x as f64).cos()).unwrap();
        let out = lowpass(&img, 0.25).unwrap();
        let residual = out.data().iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max);
        assert!(residual < 1e-9, "residual {residual}");
    }

    #[test]
    fn lowpass_is_idempotent() {
        let img = GrayImage::from_fn(24, 18, |x, y| {
            0.5 + 0.1 * (TAU * x as f64 / 24.0 * 3.0).sin() + 0.1 * (TAU * y as f64 / 18.0 * 7.0).cos()
        })
        .unwrap();
        let once = lowpass(&img, 0.2).unwrap();
        let twice = lowpass(&once, 0.2).unwrap();
        for (a, b) in once.data().iter().zip(twice.data()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let img = GrayImage::constant(4, 4, 0.0).unwrap();
        assert!(lowpass(&img, 0.0).is_err());
        assert!(lowpass(&img, 0.51).is_err());
        assert!(radial_power_spectrum(&img, 0).is_err());
        assert!(radial_power_spectrum(&GrayImage::constant(1, 4, 0.0).unwrap(), 8).is_err());
        assert!(PowerSpectrum::new(vec![0.2, 0.1], vec![1.0, 1.0]).is_err());
    }
}

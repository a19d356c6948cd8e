//! Mask degradation by resampling: low-pass at the resampling Nyquist,
//! bilinear downsample by `k`, bilinear upsample back, then re-binarize at
//! the Dice-optimal threshold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::report_csv_field;
use crate::format::NumberStyle;
use crate::raster::{BinaryMask, DatasetManifest, GrayImage};
use crate::segmetrics::{confusion, seg_metrics, SegMetrics};
use crate::spectra::lowpass;
use crate::{Error, Result};

pub const DEFAULT_THRESHOLD_LEVELS: u32 = 256;
pub const DEFAULT_FACTORS: [u32; 3] = [2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegradeConfig {
    pub factor: u32,
    pub threshold_levels: u32,
}

impl DegradeConfig {
    pub fn new(factor: u32, threshold_levels: u32) -> Result<Self> {
        if factor < 1 {
            return Err(Error::InvalidParameter("downsampling factor must be at least 1".into()));
        }
        if threshold_levels < 2 {
            return Err(Error::InvalidParameter("threshold sweep needs at least 2 levels".into()));
        }
        Ok(Self { factor, threshold_levels })
    }

    pub fn with_factor(factor: u32) -> Result<Self> {
        Self::new(factor, DEFAULT_THRESHOLD_LEVELS)
    }
}

/// Per-axis source taps for bilinear resampling with pixel-center alignment.
fn taps(input: usize, output: usize) -> Vec<(usize, usize, f64)> {
    let scale = input as f64 / output as f64;
    let last = (input - 1) as f64;
    (0..output)
        .map(|i| {
            let src = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let i0 = src.floor() as usize;
            let i1 = (i0 + 1).min(input - 1);
            (i0, i1, src - i0 as f64)
        })
        .collect()
}

/// Bilinear resize; source coordinate `(i + 0.5) * in/out - 0.5`, clamped
/// to the edge pixels.
pub fn resize_bilinear(image: &GrayImage, out_width: usize, out_height: usize) -> Result<GrayImage> {
    if out_width == 0 || out_height == 0 {
        return Err(Error::InvalidParameter(format!("resize target {out_width}x{out_height} must be positive")));
    }
    let (w, h) = (image.width(), image.height());
    let src = image.data();
    let xt = taps(w, out_width);
    let yt = taps(h, out_height);

    let mut horizontal = vec![0.0; h * out_width];
    horizontal.par_chunks_mut(out_width).enumerate().for_each(|(y, row)| {
        let line = &src[y * w..(y + 1) * w];
        for (o, &(x0, x1, t)) in row.iter_mut().zip(&xt) {
            *o = line[x0] + t * (line[x1] - line[x0]);
        }
    });
    let mut out = vec![0.0; out_width * out_height];
    out.par_chunks_mut(out_width).zip(yt.par_iter()).for_each(|(row, &(y0, y1, t))| {
        let (a, b) =
            (&horizontal[y0 * out_width..(y0 + 1) * out_width], &horizontal[y1 * out_width..(y1 + 1) * out_width]);
        for ((o, &p), &q) in row.iter_mut().zip(a).zip(b) {
            *o = p + t * (q - p);
        }
    });
    Ok(GrayImage::from_unclamped(out_width, out_height, out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub threshold: f64,
    pub dice: f64,
    pub mask: BinaryMask,
}

#[inline]
fn sweep_level(j: u32, levels: u32) -> f64 {
    f64::from(j) / f64::from(levels)
}

/// Number of sweep thresholds `j / levels` (j = 1..=levels) not above `g`.
fn thresholds_passed(g: f64, levels: u32) -> u32 {
    let mut k = ((g * f64::from(levels)).floor().max(0.0) as u32).min(levels);
    while k < levels && g >= sweep_level(k + 1, levels) {
        k += 1;
    }
    while k > 0 && g < sweep_level(k, levels) {
        k -= 1;
    }
    k
}

/// Sweeps `levels` thresholds `1/levels, 2/levels, …, 1` and keeps the one
/// whose binarization `gray >= t` maximizes Dice against `reference`. Ties go
/// to the smallest threshold.
pub fn optimal_threshold(gray: &GrayImage, reference: &BinaryMask, levels: u32) -> Result<Threshold> {
    crate::raster::same_dims((gray.width(), gray.height()), (reference.width(), reference.height()))?;
    if levels < 2 {
        return Err(Error::InvalidParameter("threshold sweep needs at least 2 levels".into()));
    }
    let positives = reference.foreground_count() as u64;
    if positives == 0 {
        return Err(Error::EmptyMask);
    }
    let n = levels as usize;
    let mut fg = vec![0u64; n + 1];
    let mut all = vec![0u64; n + 1];
    for (&g, &r) in gray.data().iter().zip(reference.data()) {
        let k = thresholds_passed(g, levels) as usize;
        all[k] += 1;
        if r {
            fg[k] += 1;
        }
    }
    // pixels with k >= j are selected by threshold j
    let (mut tp, mut selected) = (0u64, 0u64);
    let mut dice = vec![0.0; n + 1];
    for j in (1..=n).rev() {
        tp += fg[j];
        selected += all[j];
        dice[j] = (2 * tp) as f64 / (selected + positives) as f64;
    }
    let mut best = 1;
    for j in 2..=n {
        if dice[j] > dice[best] {
            best = j;
        }
    }
    let threshold = sweep_level(best as u32, levels);
    let mask = BinaryMask::new(gray.width(), gray.height(), gray.data().iter().map(|&g| g >= threshold).collect())?;
    Ok(Threshold { threshold, dice: dice[best], mask })
}

/// Gray reconstruction of `mask` after filtering and down/up resampling by `factor`.
pub fn reconstruct(mask: &BinaryMask, factor: u32) -> Result<GrayImage> {
    if factor < 1 {
        return Err(Error::InvalidParameter("downsampling factor must be at least 1".into()));
    }
    let (w, h) = (mask.width(), mask.height());
    let k = factor as usize;
    let filtered = lowpass(&mask.to_gray(), 0.5 / f64::from(factor))?;
    let small = resize_bilinear(&filtered, w.div_ceil(k), h.div_ceil(k))?;
    resize_bilinear(&small, w, h)
}

pub fn degrade_mask(mask: &BinaryMask, config: &DegradeConfig) -> Result<BinaryMask> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let gray = reconstruct(mask, config.factor)?;
    Ok(optimal_threshold(&gray, mask, config.threshold_levels)?.mask)
}

/// Metrics of the degraded mask against the original.
pub fn degradation_metrics(mask: &BinaryMask, config: &DegradeConfig) -> Result<SegMetrics> {
    let degraded = degrade_mask(mask, config)?;
    seg_metrics(&confusion(&degraded, mask)?)
}

/// Dataset-level mean metrics for one factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationRow {
    pub dataset: String,
    pub factor: u32,
    pub metrics: SegMetrics,
}

fn check_factors(factors: &[u32]) -> Result<()> {
    if factors.is_empty() {
        return Err(Error::InvalidParameter("at least one factor is required".into()));
    }
    if let Some(f) = factors.iter().find(|&&f| f < 2) {
        return Err(Error::InvalidParameter(format!("factor {f} is below 2")));
    }
    Ok(())
}

fn reduce_rows(dataset: &str, factors: &[u32], per_item: Vec<Vec<SegMetrics>>) -> Vec<DegradationRow> {
    factors
        .iter()
        .enumerate()
        .map(|(fi, &factor)| {
            let column: Vec<SegMetrics> = per_item.iter().map(|m| m[fi]).collect();
            DegradationRow { dataset: dataset.to_string(), factor, metrics: SegMetrics::mean(&column) }
        })
        .collect()
}

/// Degrades every manifest mask at every factor; rows are per-factor means
/// over images in manifest order.
pub fn run_degradation(
    manifest: &DatasetManifest,
    factors: &[u32],
    threshold_levels: u32,
) -> Result<Vec<DegradationRow>> {
    check_factors(factors)?;
    let configs = factors.iter().map(|&f| DegradeConfig::new(f, threshold_levels)).collect::<Result<Vec<_>>>()?;
    let results: Vec<Result<Vec<SegMetrics>>> = (0..manifest.items.len())
        .into_par_iter()
        .map(|i| {
            let mask = manifest.load_mask(i)?;
            configs.iter().map(|c| degradation_metrics(&mask, c)).collect::<Result<Vec<_>>>().map_err(|e| Error::Item {
                index: i,
                label: manifest.items[i].label.clone(),
                source: Box::new(e),
            })
        })
        .collect();
    let per_item = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(reduce_rows(&manifest.name, factors, per_item))
}

/// In-memory variant of [`run_degradation`].
pub fn degrade_masks(
    dataset: &str,
    masks: &[BinaryMask],
    factors: &[u32],
    threshold_levels: u32,
) -> Result<Vec<DegradationRow>> {
    check_factors(factors)?;
    let configs = factors.iter().map(|&f| DegradeConfig::new(f, threshold_levels)).collect::<Result<Vec<_>>>()?;
    let results: Vec<Result<Vec<SegMetrics>>> =
        masks.par_iter().map(|mask| configs.iter().map(|c| degradation_metrics(mask, c)).collect()).collect();
    let per_item = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(reduce_rows(dataset, factors, per_item))
}

pub const TABLE_HEADER: &str = "dataset,factor,Se,Sp,A,BA,D,J,E";

pub fn rows_to_csv(rows: &[DegradationRow], style: NumberStyle) -> String {
    let mut out = format!("{TABLE_HEADER}\n");
    for row in rows {
        out.push_str(&report_csv_field(&row.dataset));
        out.push(',');
        out.push_str(&row.factor.to_string());
        for cell in row.metrics.csv_cells(style) {
            out.push(',');
            out.push_str(&cell);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::synth;

    fn naive_bilinear(image: &GrayImage, ow: usize, oh: usize) -> Vec<f64> {
        let (w, h) = (image.width() as f64, image.height() as f64);
        let mut out = Vec::new();
        for oy in 0..oh {
            for ox in 0..ow {
                let sx = ((ox as f64 + 0.5) * w / ow as f64 - 0.5).max(0.0).min(w - 1.0);
                let sy = ((oy as f64 + 0.5) * h / oh as f64 - 0.5).max(0.0).min(h - 1.0);
                let (x0, y0) = (sx.floor(), sy.floor());
                let (x1, y1) = ((x0 + 1.0).min(w - 1.0), (y0 + 1.0).min(h - 1.0));
                let (tx, ty) = (sx - x0, sy - y0);
                let p = |x: f64, y: f64| image.get(x as usize, y as usize);
                out.push(
                    (1.0 - tx) * (1.0 - ty) * p(x0, y0)
                        + tx * (1.0 - ty) * p(x1, y0)
                        + (1.0 - tx) * ty * p(x0, y1)
                        + tx * ty * p(x1, y1),
                );
            }
        }
        out
    }

    #[test]
    fn resize_matches_naive_oracle() {
        let img = synth::noise(9, 7, 21).unwrap();
        for (ow, oh) in [(4, 3), (13, 10), (1, 1), (9, 2)] {
            let fast = resize_bilinear(&img, ow, oh).unwrap();
            for (a, b) in fast.data().iter().zip(naive_bilinear(&img, ow, oh)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn resize_identity_and_constant() {
        let img = synth::noise(11, 6, 1).unwrap();
        assert_eq!(resize_bilinear(&img, 11, 6).unwrap(), img);
        let flat = GrayImage::constant(10, 7, 0.37).unwrap();
        let out = resize_bilinear(&flat, 3, 15).unwrap();
        assert!(out.data().iter().all(|&v| (v - 0.37).abs() < 1e-15));
        assert!(resize_bilinear(&flat, 0, 2).is_err());
    }

    fn exhaustive_threshold(gray: &GrayImage, reference: &BinaryMask, levels: u32) -> (f64, f64) {
        let mut best = (0.0, -1.0);
        for j in 1..=levels {
            let t = f64::from(j) / f64::from(levels);
            let s =
                BinaryMask::new(gray.width(), gray.height(), gray.data().iter().map(|&g| g >= t).collect()).unwrap();
            let d = seg_metrics(&confusion(&s, reference).unwrap()).unwrap().d.unwrap();
            if d > best.1 {
                best = (t, d);
            }
        }
        best
    }

    #[test]
    fn threshold_of_exact_mask_is_smallest_level() {
        let m = synth::centered_disk(40, 30, 10.0).unwrap();
        let t = optimal_threshold(&m.to_gray(), &m, 256).unwrap();
        assert_eq!(t.threshold, 1.0 / 256.0);
        assert_eq!(t.dice, 1.0);
        assert_eq!(t.mask, m);
    }

    #[test]
    fn inverted_gray_gives_zero_dice() {
        let m = synth::centered_disk(40, 30, 10.0).unwrap();
        let inv = GrayImage::from_fn(40, 30, |x, y| if m.get(x, y) { 0.0 } else { 1.0 }).unwrap();
        let t = optimal_threshold(&inv, &m, 16).unwrap();
        assert_eq!(t.dice, 0.0);
        assert_eq!(t.threshold, 1.0 / 16.0);
    }

    #[test]
    fn threshold_matches_exhaustive_sweep() {
        for seed in 0..6 {
            let m = synth::vessels(48, 40, synth::VesselParams { count: 4, ..Default::default() }, seed).unwrap();
            let gray = reconstruct(&m, 3).unwrap();
            for levels in [2, 7, 64, 256] {
                let fast = optimal_threshold(&gray, &m, levels).unwrap();
                let (t, d) = exhaustive_threshold(&gray, &m, levels);
                assert_eq!(fast.threshold, t);
                assert_eq!(fast.dice, d);
                // never worse than a fixed mid threshold
                if levels % 2 == 0 {
                    let half = BinaryMask::new(48, 40, gray.data().iter().map(|&g| g >= 0.5).collect()).unwrap();
                    let dh = seg_metrics(&confusion(&half, &m).unwrap()).unwrap().d.unwrap();
                    assert!(fast.dice >= dh);
                }
            }
        }
    }

    #[test]
    fn threshold_rejects_empty_reference() {
        let g = GrayImage::constant(4, 4, 0.5).unwrap();
        assert!(matches!(optimal_threshold(&g, &BinaryMask::empty(4, 4).unwrap(), 8), Err(Error::EmptyMask)));
    }

    #[test]
    fn factor_one_is_identity() {
        let m = synth::vessels(50, 37, synth::VesselParams::default(), 2).unwrap();
        let out = degrade_mask(&m, &DegradeConfig::with_factor(1).unwrap()).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn blobs_survive_thin_structures_do_not() {
        let disk = synth::centered_disk(256, 256, 64.0).unwrap();
        let cfg = DegradeConfig::with_factor(4).unwrap();
        let d_disk = degradation_metrics(&disk, &cfg).unwrap().d.unwrap();
        assert!(d_disk >= 0.98, "disk Dice {d_disk}");
        let thin = synth::vessels(
            256,
            256,
            synth::VesselParams { stroke: Some(1), count: 12, steps: 200, ..Default::default() },
            3,
        )
        .unwrap();
        let d_thin = degradation_metrics(&thin, &cfg).unwrap().d.unwrap();
        assert!(d_disk - d_thin >= 0.1, "vessel Dice {d_thin}");
    }

    #[test]
    fn output_keeps_dimensions() {
        let m = synth::centered_disk(37, 23, 8.0).unwrap();
        for k in 1..=4 {
            let out = degrade_mask(&m, &DegradeConfig::with_factor(k).unwrap()).unwrap();
            assert_eq!((out.width(), out.height()), (37, 23));
        }
    }

    #[test]
    fn config_and_factor_validation() {
        assert!(DegradeConfig::new(0, 256).is_err());
        assert!(DegradeConfig::new(2, 1).is_err());
        let m = synth::centered_disk(16, 16, 4.0).unwrap();
        assert!(degrade_masks("x", std::slice::from_ref(&m), &[], 256).is_err());
        assert!(degrade_masks("x", &[m], &[1], 256).is_err());
    }

    #[test]
    fn csv_layout() {
        let m = synth::centered_disk(32, 32, 9.0).unwrap();
        let rows = degrade_masks("toy", &[m], &[2, 3], 256).unwrap();
        let csv = rows_to_csv(&rows, NumberStyle::Fixed4);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), TABLE_HEADER);
        assert!(lines.next().unwrap().starts_with("toy,2,"));
        assert_eq!(csv.lines().count(), 3);
    }
}

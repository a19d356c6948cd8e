//! Raster types, Netpbm I/O, color conversion and synthetic generators.

mod manifest;
pub mod pnm;
pub mod synth;

use std::fs;
use std::path::Path;

pub use manifest::{DatasetManifest, ManifestItem};
pub use pnm::{Encoding, Netpbm, PnmError, PnmKind};

use crate::{Error, Result};

/// Row-major gray-scale raster with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        if let Some(i) = data.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidRaster(format!("intensity {} at index {i} outside [0, 1]", data[i])));
        }
        Ok(Self { width, height, data })
    }

    /// Builds an image from `f(x, y)`, clamping each value into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dims(width, height, width * height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(clamp_unit(f(x, y)));
            }
        }
        Ok(Self { width, height, data })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::from_fn(width, height, |_, _| value)
    }

    /// Clamps arbitrary finite values into range; NaN becomes 0.
    pub(crate) fn from_unclamped(width: usize, height: usize, mut data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        for v in &mut data {
            *v = clamp_unit(*v);
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn transpose(&self) -> Self {
        let data = transpose(&self.data, self.width, self.height);
        Self { width: self.height, height: self.width, data }
    }

    /// Rotates 90° clockwise.
    pub fn rotate90(&self) -> Self {
        let data = rotate90(&self.data, self.width, self.height);
        Self { width: self.height, height: self.width, data }
    }
}

/// Row-major boolean raster, `true` marking foreground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_dims(width, height, width * height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self { width, height, data })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [bool] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&v| v)
    }

    /// Foreground maps to 1.0, background to 0.0.
    pub fn to_gray(&self) -> GrayImage {
        let data = self.data.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect();
        GrayImage { width: self.width, height: self.height, data }
    }

    pub fn transpose(&self) -> Self {
        let data = transpose(&self.data, self.width, self.height);
        Self { width: self.height, height: self.width, data }
    }

    pub fn rotate90(&self) -> Self {
        let data = rotate90(&self.data, self.width, self.height);
        Self { width: self.height, height: self.width, data }
    }

    pub(crate) fn same_dims(&self, other: &BinaryMask) -> Result<()> {
        same_dims((self.width, self.height), (other.width, other.height))
    }
}

/// BT.601 luma of three channel planes, clamped to `[0, 1]`.
pub fn to_gray(red: &GrayImage, green: &GrayImage, blue: &GrayImage) -> Result<GrayImage> {
    same_dims((red.width, red.height), (green.width, green.height))?;
    same_dims((red.width, red.height), (blue.width, blue.height))?;
    let data = red.data.iter().zip(&green.data).zip(&blue.data).map(|((&r, &g), &b)| luma(r, g, b)).collect();
    Ok(GrayImage { width: red.width, height: red.height, data })
}

#[inline]
pub(crate) fn luma(r: f64, g: f64, b: f64) -> f64 {
    // anchored on green so that equal channels map to themselves exactly
    clamp_unit(g + 0.299 * (r - g) + 0.114 * (b - g))
}

/// Loads a PGM (P2/P5) or PPM (P3/P6) file as a gray image.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = read(path)?;
    let pnm = Netpbm::decode(&bytes).map_err(|source| pnm_err(path, source))?;
    gray_from_netpbm(&pnm).map_err(|source| pnm_err(path, source))
}

/// Loads a PBM (P1/P4) or PGM (P2/P5) file as a mask; PGM samples are
/// binarized at half of maxval.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let bytes = read(path)?;
    let pnm = Netpbm::decode(&bytes).map_err(|source| pnm_err(path, source))?;
    mask_from_netpbm(&pnm).map_err(|source| pnm_err(path, source))
}

pub fn gray_from_netpbm(pnm: &Netpbm) -> std::result::Result<GrayImage, PnmError> {
    let maxval = f64::from(pnm.maxval);
    let norm = |s: u16| f64::from(s) / maxval;
    let data: Vec<f64> = match pnm.kind {
        PnmKind::GrayAscii | PnmKind::GrayBinary => pnm.samples.iter().map(|&s| norm(s)).collect(),
        PnmKind::RgbAscii | PnmKind::RgbBinary => {
            pnm.samples.chunks_exact(3).map(|px| luma(norm(px[0]), norm(px[1]), norm(px[2]))).collect()
        }
        PnmKind::BitmapAscii | PnmKind::BitmapBinary => {
            return Err(PnmError::UnsupportedMagic { offset: 0, magic: pnm.kind.magic().to_string() })
        }
    };
    Ok(GrayImage { width: pnm.width, height: pnm.height, data })
}

pub fn mask_from_netpbm(pnm: &Netpbm) -> std::result::Result<BinaryMask, PnmError> {
    let data = match pnm.kind {
        PnmKind::BitmapAscii | PnmKind::BitmapBinary => pnm.samples.iter().map(|&s| s != 0).collect(),
        PnmKind::GrayAscii | PnmKind::GrayBinary => {
            let maxval = f64::from(pnm.maxval);
            pnm.samples.iter().map(|&s| f64::from(s) / maxval >= 0.5).collect()
        }
        PnmKind::RgbAscii | PnmKind::RgbBinary => {
            return Err(PnmError::UnsupportedMagic { offset: 0, magic: pnm.kind.magic().to_string() })
        }
    };
    Ok(BinaryMask { width: pnm.width, height: pnm.height, data })
}

pub fn gray_to_netpbm(image: &GrayImage, encoding: Encoding, maxval: u16) -> Result<Netpbm> {
    if maxval == 0 {
        return Err(Error::InvalidParameter("maxval must be in 1..=65535".into()));
    }
    let scale = f64::from(maxval);
    let samples = image.data.iter().map(|&v| (v * scale).round() as u16).collect();
    let kind = match encoding {
        Encoding::Ascii => PnmKind::GrayAscii,
        Encoding::Binary => PnmKind::GrayBinary,
    };
    Ok(Netpbm { kind, width: image.width, height: image.height, maxval, samples })
}

pub fn mask_to_netpbm(mask: &BinaryMask, encoding: Encoding) -> Netpbm {
    let kind = match encoding {
        Encoding::Ascii => PnmKind::BitmapAscii,
        Encoding::Binary => PnmKind::BitmapBinary,
    };
    let samples = mask.data.iter().map(|&v| u16::from(v)).collect();
    Netpbm { kind, width: mask.width, height: mask.height, maxval: 1, samples }
}

/// Writes a PGM (`P2` or `P5`), quantizing intensities to `maxval` levels.
pub fn write_gray(path: impl AsRef<Path>, image: &GrayImage, encoding: Encoding, maxval: u16) -> Result<()> {
    let bytes = gray_to_netpbm(image, encoding, maxval)?.encode();
    write(path.as_ref(), &bytes)
}

/// Writes a PBM (`P1` or `P4`).
pub fn write_mask(path: impl AsRef<Path>, mask: &BinaryMask, encoding: Encoding) -> Result<()> {
    write(path.as_ref(), &mask_to_netpbm(mask, encoding).encode())
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn pnm_err(path: &Path, source: PnmError) -> Error {
    Error::Pnm { path: path.to_path_buf(), source }
}

#[inline]
pub(crate) fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidRaster(format!("dimensions must be positive, got {width}x{height}")));
    }
    if len != width * height {
        return Err(Error::InvalidRaster(format!("data length {len} does not match {width}x{height}")));
    }
    Ok(())
}

pub(crate) fn same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left_width: a.0, left_height: a.1, right_width: b.0, right_height: b.1 })
    }
}

fn transpose<T: Copy>(data: &[T], width: usize, height: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(data.len());
    for x in 0..width {
        for y in 0..height {
            out.push(data[y * width + x]);
        }
    }
    out
}

fn rotate90<T: Copy>(data: &[T], width: usize, height: usize) -> Vec<T> {
    // output is height x width; out(x', y') = in(y', height - 1 - x')
    let mut out = Vec::with_capacity(data.len());
    for oy in 0..width {
        for ox in 0..height {
            out.push(data[(height - 1 - ox) * width + oy]);
        }
    }
    out
}

//! Deterministic synthetic masks and images.
//!
//! Pixel `(x, y)` covers the unit square `[x, x+1) x [y, y+1)` of the
//! continuous frame, so its center sits at `(x + 0.5, y + 0.5)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BinaryMask, GrayImage};
use crate::{Error, Result};

/// Filled disk centered at `(cx, cy)` in frame coordinates. A pixel belongs
/// to the disk when its center lies strictly inside the circle.
pub fn disk(width: usize, height: usize, cx: f64, cy: f64, radius: f64) -> Result<BinaryMask> {
    if radius.is_nan()
        || radius < 0.0
        || cx - radius < 0.0
        || cy - radius < 0.0
        || cx + radius > width as f64
        || cy + radius > height as f64
    {
        return Err(Error::ShapeOutOfFrame { width, height });
    }
    let r2 = radius * radius;
    BinaryMask::from_fn(width, height, |x, y| {
        let dx = x as f64 + 0.5 - cx;
        let dy = y as f64 + 0.5 - cy;
        dx * dx + dy * dy < r2
    })
}

/// Disk centered in the frame.
pub fn centered_disk(width: usize, height: usize, radius: f64) -> Result<BinaryMask> {
    disk(width, height, width as f64 / 2.0, height as f64 / 2.0, radius)
}

pub fn rectangle(
    width: usize,
    height: usize,
    x0: usize,
    y0: usize,
    rect_width: usize,
    rect_height: usize,
) -> Result<BinaryMask> {
    if x0 + rect_width > width || y0 + rect_height > height {
        return Err(Error::ShapeOutOfFrame { width, height });
    }
    BinaryMask::from_fn(width, height, |x, y| (x0..x0 + rect_width).contains(&x) && (y0..y0 + rect_height).contains(&y))
}

/// Parameters of the random-walk vessel generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselParams {
    /// Number of polylines; the density knob.
    pub count: usize,
    /// Stroke width in pixels. `None` draws each polyline with a random width in 1..=3.
    pub stroke: Option<usize>,
    /// Unit-length steps per polyline.
    pub steps: usize,
    /// Maximum heading change per step, radians.
    pub wiggle: f64,
}

impl Default for VesselParams {
    fn default() -> Self {
        Self { count: 8, stroke: None, steps: 120, wiggle: 0.35 }
    }
}

/// Random-walk polylines resembling a vessel tree.
pub fn vessels(width: usize, height: usize, params: VesselParams, seed: u64) -> Result<BinaryMask> {
    if let Some(s) = params.stroke {
        if s == 0 || s > width || s > height {
            return Err(Error::ShapeOutOfFrame { width, height });
        }
    }
    if params.wiggle.is_nan() || params.wiggle < 0.0 {
        return Err(Error::InvalidParameter("vessel wiggle must be non-negative".into()));
    }
    let mut mask = BinaryMask::empty(width, height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);
    for _ in 0..params.count {
        let stroke = params.stroke.unwrap_or_else(|| rng.random_range(1..=3usize)).min(width).min(height);
        let mut x = rng.random_range(0.0..w);
        let mut y = rng.random_range(0.0..h);
        let mut heading = rng.random_range(0.0..std::f64::consts::TAU);
        for _ in 0..params.steps {
            stamp(&mut mask, x, y, stroke);
            if params.wiggle > 0.0 {
                heading += rng.random_range(-params.wiggle..=params.wiggle);
            }
            x += heading.cos();
            y += heading.sin();
            // reflect off the frame edges
            if x < 0.0 || x >= w {
                heading = std::f64::consts::PI - heading;
                x = x.clamp(0.0, w - 1e-9);
            }
            if y < 0.0 || y >= h {
                heading = -heading;
                y = y.clamp(0.0, h - 1e-9);
            }
        }
    }
    Ok(mask)
}

fn stamp(mask: &mut BinaryMask, x: f64, y: f64, stroke: usize) {
    let (width, height) = (mask.width(), mask.height());
    let half = (stroke - 1) / 2;
    let px = (x.floor() as usize).min(width - 1);
    let py = (y.floor() as usize).min(height - 1);
    let x0 = px.saturating_sub(half).min(width - stroke);
    let y0 = py.saturating_sub(half).min(height - stroke);
    let data = mask.data_mut();
    for yy in y0..y0 + stroke {
        for xx in x0..x0 + stroke {
            data[yy * width + xx] = true;
        }
    }
}

/// I.i.d. uniform intensities in `[0, 1)`.
pub fn noise(width: usize, height: usize, seed: u64) -> Result<GrayImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::from_fn(width, height, |_, _| rng.random::<f64>())
}

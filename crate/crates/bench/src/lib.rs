//! Shared inputs for the `segc-core` benchmarks.

use segc_core::raster::synth;
use segc_core::{BinaryMask, GrayImage};

/// A vessel-like mask and a noisy image of it, both `size` × `size`.
pub fn sample(size: usize, seed: u64) -> (GrayImage, BinaryMask) {
    let mask = synth::vessels(size, size, synth::VesselParams::default(), seed).expect("vessel mask");
    let noise = synth::noise(size, size, seed + 1).expect("noise");
    let image =
        GrayImage::from_fn(size, size, |x, y| 0.8 * f64::from(u8::from(mask.get(x, y))) + 0.2 * noise.get(x, y))
            .expect("image");
    (image, mask)
}

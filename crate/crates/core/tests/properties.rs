use segc_core::complexity::{delentropy, measure_pair, perimetric_complexity};
use segc_core::raster::synth;
use segc_core::{BinaryMask, GrayImage};

/// `k` equal disks in a row whose total area matches one disk of radius `r`.
fn split_disks(k: usize, r: f64) -> BinaryMask {
    let rk = r / (k as f64).sqrt();
    let width = (2.0 * rk + 4.0) as usize * k + 8;
    let height = (2.0 * r) as usize + 8;
    let centers: Vec<f64> = (0..k).map(|i| 4.0 + (2.0 * rk + 4.0).floor() * i as f64 + rk + 2.0).collect();
    BinaryMask::from_fn(width, height, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        centers.iter().any(|cx| (px - cx).powi(2) + (py - height as f64 / 2.0).powi(2) < rk * rk)
    })
    .unwrap()
}

#[test]
fn splitting_a_disk_raises_perimetric_complexity() {
    let one = perimetric_complexity(&split_disks(1, 40.0)).unwrap();
    for k in 2..=5 {
        let pc = perimetric_complexity(&split_disks(k, 40.0)).unwrap();
        assert!(pc > one, "k={k}: {pc} <= {one}");
    }
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut r = vec![0.0; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        r[i] = rank as f64;
    }
    r
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn complexity_tracks_vessel_density() {
    let counts = [1usize, 2, 4, 8, 16, 32];
    let mut mnf = Vec::new();
    let mut mdf = Vec::new();
    let mut pc = Vec::new();
    for &count in &counts {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for seed in 0..3 {
            let params = synth::VesselParams { count, stroke: Some(1), ..Default::default() };
            let mask = synth::vessels(128, 128, params, seed).unwrap();
            let m = measure_pair(&mask.to_gray(), &mask, 128).unwrap();
            a += m.mnf.unwrap();
            b += m.mdf.unwrap();
            c += m.pc.unwrap();
        }
        mnf.push(a);
        mdf.push(b);
        pc.push(c);
    }
    let density: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    for (name, values) in [("MNF", &mnf), ("MDF", &mdf), ("PC", &pc)] {
        let rho = spearman(&density, values);
        assert!(rho >= 0.9, "{name}: rho {rho} over {values:?}");
    }
}

#[test]
fn delentropy_is_rotation_invariant() {
    let image = synth::noise(37, 23, 9).unwrap();
    let de = delentropy(&image).unwrap();
    for other in [image.transpose(), image.rotate90(), image.rotate90().rotate90()] {
        assert!((delentropy(&other).unwrap() - de).abs() < 1e-9);
    }
}

#[test]
fn richer_texture_has_higher_delentropy() {
    let smooth = GrayImage::from_fn(64, 64, |x, y| ((x + y) as f64 / 126.0).clamp(0.0, 1.0)).unwrap();
    let noisy = synth::noise(64, 64, 1).unwrap();
    assert!(delentropy(&noisy).unwrap() > delentropy(&smooth).unwrap());
}

use std::fs;

use segc_core::complexity::complexity_report;
use segc_core::raster::pnm::Encoding;
use segc_core::raster::{load_gray, load_mask, synth, write_gray, write_mask};
use segc_core::{DatasetManifest, Error, ErrorKind, GrayImage};

#[test]
fn written_rasters_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let image = GrayImage::from_fn(17, 9, |x, y| ((x * 15 + y * 7) % 256) as f64 / 255.0).unwrap();
    let mask = synth::vessels(17, 9, synth::VesselParams::default(), 4).unwrap();
    for (i, encoding) in [Encoding::Ascii, Encoding::Binary].into_iter().enumerate() {
        let (g, m) = (dir.path().join(format!("g{i}.pgm")), dir.path().join(format!("m{i}.pbm")));
        write_gray(&g, &image, encoding, 255).unwrap();
        write_mask(&m, &mask, encoding).unwrap();
        assert_eq!(load_gray(&g).unwrap(), image);
        assert_eq!(load_mask(&m).unwrap(), mask);
    }
}

#[test]
fn manifest_report_follows_item_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut items = Vec::new();
    for (i, r) in [6.0, 12.0, 9.0].iter().enumerate() {
        let mask = synth::centered_disk(40, 40, *r).unwrap();
        let noise = synth::noise(40, 40, i as u64).unwrap();
        write_gray(dir.path().join(format!("i{i}.pgm")), &noise, Encoding::Binary, 255).unwrap();
        write_mask(dir.path().join(format!("m{i}.pbm")), &mask, Encoding::Binary).unwrap();
        items.push(format!(r#"{{"image": "i{i}.pgm", "mask": "m{i}.pbm"}}"#));
    }
    let path = dir.path().join("set.json");
    fs::write(&path, format!(r#"{{"name": "set", "items": [{}]}}"#, items.join(","))).unwrap();
    let manifest = DatasetManifest::load(&path).unwrap();
    let report = complexity_report(&manifest, 64).unwrap();
    let labels: Vec<&str> = report.per_image.iter().map(|i| i.path.as_str()).collect();
    assert_eq!(labels, ["i0.pgm", "i1.pgm", "i2.pgm"]);
    let pcs: Vec<f64> = report.per_image.iter().map(|i| i.measures.pc.unwrap()).collect();
    let mean = pcs.iter().sum::<f64>() / 3.0;
    assert!((report.aggregate.pc.unwrap() - mean).abs() < 1e-12);
}

#[test]
fn missing_item_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.json");
    fs::write(&path, r#"{"name": "set", "items": [{"image": "a.pgm", "mask": "b.pbm"}]}"#).unwrap();
    let manifest = DatasetManifest::load(&path).unwrap();
    let err = complexity_report(&manifest, 64).unwrap_err();
    assert!(matches!(err, Error::Item { index: 0, .. }));
    assert_eq!(err.kind(), ErrorKind::Io);
    assert!(err.to_string().contains("a.pgm"));
}

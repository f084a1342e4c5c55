mod common;

use objcount::counting::{count_objects, run_pipeline, PipelineConfig};
use objcount::imageio::{decode_gray, encode_pgm};
use objcount::segmentation::{Method, Polarity, SegmentationConfig};
use objcount::sizing::{estimate_diameter, extract_runs, Direction};
use objcount::synthetic::{generate_scene, Placement, SceneSpec};
use objcount::{Error, GrayImage, Stage};
use rand::Rng;

use common::*;

fn separated(n: usize, seed: u64) -> SceneSpec {
    SceneSpec {
        placement: Placement::NonOverlapping,
        ..SceneSpec::new(1000, 1000, 100, n, seed)
    }
}

#[test]
fn fifty_separated_discs_count_within_ten_percent() {
    for seed in 0..5 {
        let img = generate_scene(&separated(50, seed)).unwrap().mask.to_gray(255, 0);
        let r = run_pipeline(&img, &PipelineConfig::default()).unwrap();
        let err = (r.count_rounded as f64 - 50.0).abs() / 50.0;
        assert!(err <= 0.10, "seed {seed}: count {} (d={})", r.count_rounded, r.diameter);
    }
}

#[test]
fn overlapping_discs_count_as_covered_area() {
    // With overlap the union area shrinks, and the count follows it:
    // n * (1 - overlap) discs worth of pixels.
    for seed in 0..5 {
        let scene = generate_scene(&SceneSpec::new(1000, 1000, 100, 50, seed)).unwrap();
        let effective = 50.0 * (1.0 - scene.overlap);
        let r = run_pipeline(&scene.mask.to_gray(255, 0), &PipelineConfig::default()).unwrap();
        let err = (r.count_real - effective).abs() / effective;
        assert!(err <= 0.10, "seed {seed}: {} vs {effective}", r.count_real);
    }
}

#[test]
fn lone_disc_counts_one() {
    let m = disc_mask(160, 160, 80.3, 79.6, 100.0);
    let est = estimate_diameter(&extract_runs(&m, Direction::Horizontal).smooth(11).unwrap(), 0.8).unwrap();
    assert_eq!(count_objects(&m, &est).unwrap().count_rounded, 1);
}

#[test]
fn polarity_symmetry() {
    let mask = generate_scene(&separated(30, 3)).unwrap().mask;
    let bright = run_pipeline(&mask.to_gray(230, 20), &PipelineConfig::default()).unwrap();
    let dark_cfg = PipelineConfig {
        segmentation: SegmentationConfig {
            polarity: Polarity::DarkObjects,
            ..Default::default()
        },
        ..Default::default()
    };
    let dark = run_pipeline(&mask.to_gray(20, 230), &dark_cfg).unwrap();
    assert_eq!(bright, dark);
}

#[test]
fn deterministic_results() {
    let img = generate_scene(&SceneSpec::new(600, 500, 60, 40, 12)).unwrap().mask.to_gray(255, 0);
    let a = run_pipeline(&img, &PipelineConfig::default()).unwrap();
    let b = run_pipeline(&img, &PipelineConfig::default()).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.count_real.to_bits(), b.count_real.to_bits());
}

#[test]
fn noisy_image_with_otsu_and_region_growing() {
    let mask = generate_scene(&separated(40, 21)).unwrap().mask;
    let mut rng = rng(5);
    let data: Vec<u8> = mask
        .data()
        .iter()
        .map(|&v| {
            let base: i32 = if v { 180 } else { 60 };
            (base + rng.random_range(-25..=25)).clamp(0, 255) as u8
        })
        .collect();
    let img = GrayImage::new(1000, 1000, data).unwrap();

    let otsu = run_pipeline(&img, &PipelineConfig::default()).unwrap();
    assert!((otsu.count_rounded as i64 - 40).abs() <= 4, "otsu {}", otsu.count_rounded);

    let rg = PipelineConfig {
        segmentation: SegmentationConfig {
            method: Method::RegionGrowing,
            polarity: Polarity::BrightObjects,
            rg_seed_threshold: 200,
            rg_tolerance: 40,
        },
        ..Default::default()
    };
    let grown = run_pipeline(&img, &rg).unwrap();
    assert!((grown.count_rounded as i64 - 40).abs() <= 4, "region growing {}", grown.count_rounded);
}

#[test]
fn vertical_direction_agrees_on_discs() {
    let img = generate_scene(&separated(30, 8)).unwrap().mask.to_gray(255, 0);
    let h = run_pipeline(&img, &PipelineConfig::default()).unwrap();
    let v = run_pipeline(
        &img,
        &PipelineConfig {
            direction: Direction::Vertical,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((h.diameter as i64 - v.diameter as i64).abs() <= 2);
}

#[test]
fn blank_image_reports_sizing_stage() {
    let img = GrayImage::filled(64, 64, 0).unwrap();
    let err = run_pipeline(&img, &PipelineConfig::default()).unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Sizing));
    assert!(matches!(err.root(), Error::EmptyHistogram));
}

#[test]
fn pgm_and_png_inputs_agree() {
    let gray = generate_scene(&SceneSpec::new(200, 150, 30, 10, 2)).unwrap().mask.to_gray(240, 10);
    let mut png_bytes = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut png_bytes, 200, 150);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        enc.write_header().unwrap().write_image_data(gray.data()).unwrap();
    }
    let from_png = decode_gray(&png_bytes).unwrap();
    let from_pgm = decode_gray(&encode_pgm(&gray)).unwrap();
    assert_eq!(from_png, from_pgm);
    assert_eq!(from_png, gray);
}

#[test]
fn p5_example_through_png() {
    let p5 = decode_gray(b"P5 2 1 255 \x00\xff").unwrap();
    let mut png_bytes = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut png_bytes, 2, 1);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        enc.write_header().unwrap().write_image_data(p5.data()).unwrap();
    }
    assert_eq!(decode_gray(&png_bytes).unwrap(), p5);
}

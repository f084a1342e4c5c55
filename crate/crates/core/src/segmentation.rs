//! Binarization of grayscale images: Otsu global thresholding and seeded
//! region growing.

use std::collections::VecDeque;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::{BinaryMask, GrayImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Otsu,
    RegionGrowing,
}

/// Whether objects are brighter or darker than the background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    #[default]
    BrightObjects,
    DarkObjects,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "otsu" => Ok(Method::Otsu),
            "region-growing" | "region_growing" => Ok(Method::RegionGrowing),
            _ => Err(Error::param(format!(
                "segmentation method must be otsu or region-growing, got {s:?}"
            ))),
        }
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bright" | "bright_objects" | "bright-objects" => Ok(Polarity::BrightObjects),
            "dark" | "dark_objects" | "dark-objects" => Ok(Polarity::DarkObjects),
            _ => Err(Error::param(format!("polarity must be bright or dark, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentationConfig {
    pub method: Method,
    pub polarity: Polarity,
    /// Maximum luminance distance from a region's running mean.
    pub rg_tolerance: u8,
    /// Luminance a pixel must reach (bright) or not exceed (dark) to seed a region.
    pub rg_seed_threshold: u8,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            method: Method::Otsu,
            polarity: Polarity::BrightObjects,
            rg_tolerance: 20,
            rg_seed_threshold: 200,
        }
    }
}

/// Output of [`segment`].
#[derive(Debug, Clone)]
pub struct Segmented {
    pub mask: BinaryMask,
    /// Otsu level used, if the Otsu method was selected and succeeded.
    pub level: Option<u8>,
    pub warnings: Vec<String>,
}

fn gray_histogram(img: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[v as usize] += 1;
    }
    hist
}

/// Otsu threshold: the level `t` maximizing between-class variance for the
/// split `[0, t]` / `[t+1, 255]`, smallest `t` on ties.
///
/// Fails with [`Error::DegenerateHistogram`] when no split has positive
/// variance (a constant image).
pub fn otsu_level(img: &GrayImage) -> Result<u8> {
    let hist = gray_histogram(img);
    let total = img.len() as i128;
    let total_sum: i128 = hist.iter().enumerate().map(|(v, &c)| v as i128 * c as i128).sum();

    let mut best_level = 0u8;
    let mut best = 0.0f64;
    let (mut below, mut below_sum) = (0i128, 0i128);
    for t in 0..255usize {
        below += hist[t] as i128;
        below_sum += t as i128 * hist[t] as i128;
        let above = total - below;
        if below == 0 || above == 0 {
            continue;
        }
        // N^2 * sigma_b^2 = (s0*N - S*n0)^2 / (n0*n1)
        let diff = (below_sum * total - total_sum * below) as f64;
        let variance = diff * diff / (below as f64 * above as f64);
        if variance > best {
            best = variance;
            best_level = t as u8;
        }
    }
    if best > 0.0 {
        Ok(best_level)
    } else {
        Err(Error::DegenerateHistogram)
    }
}

/// Bright objects: pixel > level. Dark objects: pixel <= level.
pub fn apply_threshold(img: &GrayImage, level: u8, polarity: Polarity) -> BinaryMask {
    let data = img
        .data()
        .iter()
        .map(|&v| match polarity {
            Polarity::BrightObjects => v > level,
            Polarity::DarkObjects => v <= level,
        })
        .collect();
    BinaryMask::new(img.width(), img.height(), data).expect("dimensions come from a valid image")
}

/// Seeded region growing.
///
/// Seeds are visited in row-major order; each unlabeled seed starts a region
/// that grows over 4-neighbors (FIFO) whose luminance is within
/// `rg_tolerance` of the region's running mean.
pub fn region_grow(img: &GrayImage, cfg: &SegmentationConfig) -> Result<BinaryMask> {
    if cfg.method != Method::RegionGrowing {
        return Err(Error::param("region_grow requires the region-growing method"));
    }
    let (w, h) = (img.width() as usize, img.height() as usize);
    let px = img.data();
    let tol = cfg.rg_tolerance as i64;
    let is_seed = |v: u8| match cfg.polarity {
        Polarity::BrightObjects => v >= cfg.rg_seed_threshold,
        Polarity::DarkObjects => v <= cfg.rg_seed_threshold,
    };

    let mut labeled = vec![false; w * h];
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if labeled[start] || !is_seed(px[start]) {
            continue;
        }
        labeled[start] = true;
        queue.push_back(start);
        let mut sum = px[start] as i64;
        let mut count = 1i64;
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            let neighbors = [
                (x > 0).then(|| i - 1),
                (x + 1 < w).then(|| i + 1),
                (y > 0).then(|| i - w),
                (y + 1 < h).then(|| i + w),
            ];
            for j in neighbors.into_iter().flatten() {
                if labeled[j] {
                    continue;
                }
                // |v - sum/count| <= tol, in integers
                let v = px[j] as i64;
                if (v * count - sum).abs() <= tol * count {
                    labeled[j] = true;
                    sum += v;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
    }
    BinaryMask::new(img.width(), img.height(), labeled)
}

/// Run the configured segmentation method.
///
/// A constant image gives Otsu nothing to split; it is then treated as
/// containing no objects and a warning is recorded.
pub fn segment(img: &GrayImage, cfg: &SegmentationConfig) -> Result<Segmented> {
    match cfg.method {
        Method::Otsu => match otsu_level(img) {
            Ok(level) => Ok(Segmented {
                mask: apply_threshold(img, level, cfg.polarity),
                level: Some(level),
                warnings: Vec::new(),
            }),
            Err(Error::DegenerateHistogram) => Ok(Segmented {
                mask: BinaryMask::background(img.width(), img.height())?,
                level: None,
                warnings: vec!["constant image: otsu threshold undefined, no objects segmented".into()],
            }),
            Err(e) => Err(e),
        },
        Method::RegionGrowing => Ok(Segmented {
            mask: region_grow(img, cfg)?,
            level: None,
            warnings: Vec::new(),
        }),
    }
}

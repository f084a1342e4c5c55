//! Object count from total object area and estimated diameter, and the
//! end-to-end counting pipeline.

use std::f64::consts::PI;

use serde::Serialize;

use crate::enhance::{median_filter_in_place, DEFAULT_MEDIAN_WINDOW};
use crate::error::{Error, Result, Stage};
use crate::imageio::{BinaryMask, GrayImage};
use crate::segmentation::{segment, SegmentationConfig};
use crate::sizing::{
    check_alpha, estimate_diameter, extract_runs, Direction, SizeEstimate, DEFAULT_ALPHA,
    DEFAULT_SMOOTH_WINDOW,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountResult {
    #[serde(rename = "count")]
    pub count_rounded: u64,
    pub count_real: f64,
    pub diameter: usize,
    pub white_pixels: u64,
    pub x_max: usize,
    pub alpha: f64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub peak: f64,
    /// Number of runs in the histogram, when the count came from the pipeline.
    #[serde(skip)]
    pub histogram_total: Option<u64>,
}

impl CountResult {
    /// Single-line JSON object with stable field names.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("count result is always serializable")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub segmentation: SegmentationConfig,
    pub median_window: usize,
    pub smooth_window: usize,
    pub alpha: f64,
    pub direction: Direction,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            segmentation: SegmentationConfig::default(),
            median_window: DEFAULT_MEDIAN_WINDOW,
            smooth_window: DEFAULT_SMOOTH_WINDOW,
            alpha: DEFAULT_ALPHA,
            direction: Direction::Horizontal,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.median_window == 0 || self.median_window % 2 == 0 {
            return Err(Error::param(format!(
                "median window must be odd and at least 1, got {}",
                self.median_window
            )));
        }
        if self.smooth_window == 0 || self.smooth_window % 2 == 0 {
            return Err(Error::param(format!(
                "smoothing window must be odd and at least 1, got {}",
                self.smooth_window
            )));
        }
        Ok(())
    }
}

/// `white_pixels / (pi * (diameter/2)^2)`.
pub fn objects_from_area(white_pixels: u64, diameter: f64) -> Result<f64> {
    if !(diameter > 0.0) || !diameter.is_finite() {
        return Err(Error::param(format!(
            "diameter must be positive, got {diameter}"
        )));
    }
    let radius = diameter / 2.0;
    Ok(white_pixels as f64 / (PI * radius * radius))
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

/// Count objects in `mask` assuming each is a disc of the estimated diameter.
pub fn count_objects(mask: &BinaryMask, est: &SizeEstimate) -> Result<CountResult> {
    let white_pixels = mask.object_pixels();
    let count_real = objects_from_area(white_pixels, est.diameter as f64)?;
    Ok(CountResult {
        count_rounded: round_half_up(count_real),
        count_real,
        diameter: est.diameter,
        white_pixels,
        x_max: est.x_max,
        alpha: est.alpha,
        warnings: Vec::new(),
        peak: est.peak,
        histogram_total: None,
    })
}

/// Segmentation followed by median filtering.
pub fn prepare_mask(img: &GrayImage, cfg: &PipelineConfig) -> Result<(BinaryMask, Vec<String>)> {
    cfg.validate()?;
    let seg = segment(img, &cfg.segmentation).map_err(|e| e.at(Stage::Segmentation))?;
    let mut mask = seg.mask;
    median_filter_in_place(&mut mask, cfg.median_window).map_err(|e| e.at(Stage::Enhancement))?;
    Ok((mask, seg.warnings))
}

/// Run the whole counting pipeline on a grayscale image.
pub fn run_pipeline(img: &GrayImage, cfg: &PipelineConfig) -> Result<CountResult> {
    let (mask, mut warnings) = prepare_mask(img, cfg)?;

    let hist = extract_runs(&mask, cfg.direction);
    let est = hist
        .smooth(cfg.smooth_window)
        .and_then(|s| estimate_diameter(&s, cfg.alpha))
        .map_err(|e| e.at(Stage::Sizing))?;
    if est.crossing_in_padding {
        warnings.push(format!(
            "histogram never fell to alpha*peak within the observed run lengths; \
             diameter {} taken from the zero-padded tail",
            est.diameter
        ));
    }

    let mut result = count_objects(&mask, &est).map_err(|e| e.at(Stage::Counting))?;
    result.histogram_total = Some(hist.total_runs());
    result.warnings = warnings;
    Ok(result)
}

//! Random disc scenes with ground truth, and the diameter-estimation
//! robustness experiment over increasing disc densities.
//!
//! Scenes are drawn from `ChaCha8Rng::seed_from_u64(seed)`. For each disc in
//! order, the diameter is drawn first (only for a diameter range), then the
//! center `x` and `y`, each uniform over the allowed interval. Trial seeds in
//! an experiment are derived with [`derive_seed`], so any single trial can be
//! regenerated on its own.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imageio::{BinaryMask, MAX_DIMENSION};
use crate::sizing::{estimate_diameter, extract_runs, Direction, DEFAULT_ALPHA, DEFAULT_SMOOTH_WINDOW};

/// Draw attempts per disc before non-overlapping placement gives up.
const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscSize {
    Fixed(u32),
    /// Uniform integer diameter in `min..=max`.
    Range { min: u32, max: u32 },
}

impl DiscSize {
    pub fn max(self) -> u32 {
        match self {
            DiscSize::Fixed(d) => d,
            DiscSize::Range { max, .. } => max,
        }
    }

    pub fn min(self) -> u32 {
        match self {
            DiscSize::Fixed(d) => d,
            DiscSize::Range { min, .. } => min,
        }
    }

    /// Expected diameter.
    pub fn mean(self) -> f64 {
        (self.min() as f64 + self.max() as f64) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    /// Every disc lies completely inside the frame.
    #[default]
    FullInside,
    /// Centers anywhere in the frame; discs may be clipped by the border.
    Anywhere,
    /// Inside the frame, and no two discs share a pixel (they may touch).
    NonOverlapping,
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-inside" | "full_inside" => Ok(Placement::FullInside),
            "anywhere" => Ok(Placement::Anywhere),
            "non-overlapping" | "non_overlapping" => Ok(Placement::NonOverlapping),
            _ => Err(Error::param(format!(
                "placement must be full-inside, anywhere or non-overlapping, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SceneSpec {
    pub width: u32,
    pub height: u32,
    pub diameter: DiscSize,
    pub n_discs: usize,
    pub seed: u64,
    pub placement: Placement,
}

impl SceneSpec {
    pub fn new(width: u32, height: u32, diameter: u32, n_discs: usize, seed: u64) -> Self {
        SceneSpec {
            width,
            height,
            diameter: DiscSize::Fixed(diameter),
            n_discs,
            seed,
            placement: Placement::FullInside,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.width > MAX_DIMENSION || self.height > MAX_DIMENSION {
            return Err(Error::InvalidDimensions {
                width: self.width as u64,
                height: self.height as u64,
            });
        }
        if self.diameter.min() == 0 || self.diameter.min() > self.diameter.max() {
            return Err(Error::param(format!(
                "disc diameter range {}..={} is invalid",
                self.diameter.min(),
                self.diameter.max()
            )));
        }
        if self.n_discs > 0
            && self.placement != Placement::Anywhere
            && self.diameter.max() > self.width.min(self.height)
        {
            return Err(Error::param(format!(
                "disc diameter {} does not fit inside a {}x{} image",
                self.diameter.max(),
                self.width,
                self.height
            )));
        }
        Ok(())
    }
}

/// Generated scene and its ground truth.
#[derive(Debug, Clone)]
pub struct SceneTruth {
    pub mask: BinaryMask,
    pub n_discs: usize,
    pub centers: Vec<(f64, f64)>,
    pub diameters: Vec<u32>,
    /// Object pixels over all pixels.
    pub occupancy: f64,
    /// `1 - union / sum of individual disc pixel counts`.
    pub overlap: f64,
}

/// Rasterize one disc into `mask`, returning how many pixels it covers.
/// A pixel belongs to the disc when its center is within the radius.
fn draw_disc(mask: &mut BinaryMask, cx: f64, cy: f64, diameter: u32) -> u64 {
    let r = diameter as f64 / 2.0;
    let r2 = r * r;
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let x0 = ((cx - r - 0.5).floor() as i64).max(0);
    let x1 = ((cx + r - 0.5).ceil() as i64).min(w - 1);
    let y0 = ((cy - r - 0.5).floor() as i64).max(0);
    let y1 = ((cy + r - 0.5).ceil() as i64).min(h - 1);
    let width = w as usize;
    let data = mask.data_mut();
    let mut covered = 0;
    for py in y0..=y1 {
        let dy = py as f64 + 0.5 - cy;
        for px in x0..=x1 {
            let dx = px as f64 + 0.5 - cx;
            if dx * dx + dy * dy <= r2 {
                data[py as usize * width + px as usize] = true;
                covered += 1;
            }
        }
    }
    covered
}

/// Draw a random disc scene.
pub fn generate_scene(spec: &SceneSpec) -> Result<SceneTruth> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (w, h) = (spec.width as f64, spec.height as f64);

    let mut centers: Vec<(f64, f64)> = Vec::with_capacity(spec.n_discs);
    let mut diameters = Vec::with_capacity(spec.n_discs);
    for i in 0..spec.n_discs {
        let d = match spec.diameter {
            DiscSize::Fixed(d) => d,
            DiscSize::Range { min, max } => rng.random_range(min..=max),
        };
        let r = d as f64 / 2.0;
        let center = match spec.placement {
            Placement::Anywhere => (rng.random_range(0.0..w), rng.random_range(0.0..h)),
            Placement::FullInside => (rng.random_range(r..=w - r), rng.random_range(r..=h - r)),
            Placement::NonOverlapping => {
                let mut attempt = 0;
                loop {
                    let c = (rng.random_range(r..=w - r), rng.random_range(r..=h - r));
                    let clear = centers.iter().zip(&diameters).all(|(&(x, y), &dj)| {
                        let gap = r + dj as f64 / 2.0;
                        (c.0 - x).powi(2) + (c.1 - y).powi(2) > gap * gap
                    });
                    if clear {
                        break c;
                    }
                    attempt += 1;
                    if attempt == MAX_PLACEMENT_ATTEMPTS {
                        return Err(Error::param(format!(
                            "could not place disc {} of {} without overlap",
                            i + 1,
                            spec.n_discs
                        )));
                    }
                }
            }
        };
        centers.push(center);
        diameters.push(d);
    }

    let mut mask = BinaryMask::background(spec.width, spec.height)?;
    let individual: u64 = centers
        .iter()
        .zip(&diameters)
        .map(|(&(cx, cy), &d)| draw_disc(&mut mask, cx, cy, d))
        .sum();
    let union = mask.object_pixels();
    let total = spec.width as f64 * spec.height as f64;
    Ok(SceneTruth {
        occupancy: union as f64 / total,
        overlap: if individual == 0 {
            0.0
        } else {
            1.0 - union as f64 / individual as f64
        },
        mask,
        n_discs: spec.n_discs,
        centers,
        diameters,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed: `splitmix64(splitmix64(splitmix64(seed) ^ density) ^ trial)`.
pub fn derive_seed(seed: u64, density: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ density) ^ trial)
}

/// How the diameter is read from a scene's run histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SizeMethod {
    /// Smoothed histogram with the `alpha` crossing.
    #[default]
    AlphaCorrected,
    /// Most frequent raw run length.
    HistogramPeak,
}

impl FromStr for SizeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" | "alpha-corrected" => Ok(SizeMethod::AlphaCorrected),
            "peak" | "histogram-peak" => Ok(SizeMethod::HistogramPeak),
            _ => Err(Error::param(format!("estimator must be alpha or peak, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub method: SizeMethod,
    pub alpha: f64,
    pub smooth_window: usize,
    pub direction: Direction,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            method: SizeMethod::AlphaCorrected,
            alpha: DEFAULT_ALPHA,
            smooth_window: DEFAULT_SMOOTH_WINDOW,
            direction: Direction::Horizontal,
        }
    }
}

impl EstimatorConfig {
    /// Estimated diameter of the objects in `mask`, or `None` if the mask
    /// has no runs.
    pub fn estimate(&self, mask: &BinaryMask) -> Result<Option<usize>> {
        let hist = extract_runs(mask, self.direction);
        if hist.is_empty() {
            return Ok(None);
        }
        match self.method {
            SizeMethod::HistogramPeak => Ok(hist.mode()),
            SizeMethod::AlphaCorrected => {
                let smoothed = hist.smooth(self.smooth_window)?;
                Ok(Some(estimate_diameter(&smoothed, self.alpha)?.diameter))
            }
        }
    }
}

/// Tally for one density.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOutcome {
    pub density: usize,
    pub trials: usize,
    pub errors: usize,
    /// Per-trial estimates in trial order; `None` for an empty scene.
    pub estimates: Vec<Option<usize>>,
}

impl DensityOutcome {
    pub fn error_rate(&self) -> f64 {
        self.errors as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub tolerance: f64,
    pub outcomes: Vec<DensityOutcome>,
}

impl ExperimentResult {
    /// CSV with header `density,trials,errors,error_rate`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("density,trials,errors,error_rate\n");
        for o in &self.outcomes {
            let _ = writeln!(
                out,
                "{},{},{},{:.6}",
                o.density,
                o.trials,
                o.errors,
                o.error_rate()
            );
        }
        out
    }
}

/// For each density, generate `trials` scenes from `template` (its
/// `n_discs` and `seed` replaced per trial) and count how often the estimated
/// diameter is more than `tolerance` pixels off the template's diameter.
/// Segmentation and filtering are skipped: generated masks are already clean.
pub fn run_density_experiment(
    densities: &[usize],
    trials: usize,
    template: &SceneSpec,
    estimator: &EstimatorConfig,
    tolerance: f64,
) -> Result<ExperimentResult> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    if !(tolerance >= 0.0) {
        return Err(Error::param("tolerance must be non-negative"));
    }
    if estimator.method == SizeMethod::AlphaCorrected {
        crate::sizing::check_alpha(estimator.alpha)?;
    }
    template.validate()?;
    let truth = template.diameter.mean();

    let mut outcomes = Vec::with_capacity(densities.len());
    for &density in densities {
        let estimates = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let spec = SceneSpec {
                    n_discs: density,
                    seed: derive_seed(template.seed, density as u64, trial as u64),
                    ..*template
                };
                let scene = generate_scene(&spec)?;
                estimator.estimate(&scene.mask)
            })
            .collect::<Result<Vec<_>>>()?;
        let errors = estimates
            .iter()
            .filter(|e| e.is_none_or(|d| (d as f64 - truth).abs() > tolerance))
            .count();
        outcomes.push(DensityOutcome {
            density,
            trials,
            errors,
            estimates,
        });
    }
    Ok(ExperimentResult {
        tolerance,
        outcomes,
    })
}

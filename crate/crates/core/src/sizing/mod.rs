//! Object size estimation from run-length histograms.
//!
//! Runs of object pixels along one scan direction are tallied by length, the
//! tally is smoothed with a fixed-divisor mean filter, and the diameter is
//! read off where the smoothed curve first falls to `alpha` times its peak on
//! the right-hand side of the maximum. The peak of the raw tally sits a little
//! below the true diameter for discs, and the `alpha` crossing corrects for it
//! as well as for spread in object sizes.

mod analytic;

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::BinaryMask;

pub use self::analytic::{chord_density, mixed_chord_density, sample_mixed_chord_density};

pub const DEFAULT_SMOOTH_WINDOW: usize = 11;
pub const DEFAULT_ALPHA: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Horizontal,
    Vertical,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "horizontal" | "h" => Ok(Direction::Horizontal),
            "vertical" | "v" => Ok(Direction::Vertical),
            _ => Err(Error::param(format!(
                "direction must be horizontal or vertical, got {s:?}"
            ))),
        }
    }
}

/// Number of runs of each length. `counts[x]` is the number of runs of
/// length exactly `x`; index 0 is always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunHistogram {
    counts: Vec<u64>,
    direction: Direction,
}

impl RunHistogram {
    pub fn from_counts(counts: Vec<u64>, direction: Direction) -> Result<Self> {
        if counts.first().is_some_and(|&c| c != 0) {
            return Err(Error::param("runs of length 0 cannot be counted"));
        }
        let mut counts = counts;
        while counts.len() > 1 && counts.last() == Some(&0) {
            counts.pop();
        }
        if counts.is_empty() {
            counts.push(0);
        }
        Ok(RunHistogram { counts, direction })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Longest run observed (0 for an empty histogram).
    pub fn max_length(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, length: usize) -> u64 {
        self.counts.get(length).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_runs(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Sum of `length * count`, i.e. the number of object pixels covered.
    pub fn covered_pixels(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(x, &c)| x as u64 * c)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.max_length() == 0
    }

    /// Most frequent run length (smallest on ties), or `None` when empty.
    pub fn mode(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let mut best = 1;
        for x in 2..self.counts.len() {
            if self.counts[x] > self.counts[best] {
                best = x;
            }
        }
        Some(best)
    }

    pub fn smooth(&self, window: usize) -> Result<SmoothedHistogram> {
        if self.is_empty() {
            return Err(Error::EmptyHistogram);
        }
        let samples: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        smooth(&samples, window)
    }

    /// CSV with a `length,count` header and one row per length `1..=max_length`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,count\n");
        for (x, c) in self.counts.iter().enumerate().skip(1) {
            let _ = writeln!(out, "{x},{c}");
        }
        out
    }
}

/// Tally maximal runs of object pixels along rows (horizontal) or columns
/// (vertical).
pub fn extract_runs(mask: &BinaryMask, direction: Direction) -> RunHistogram {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let data = mask.data();
    let line_len = match direction {
        Direction::Horizontal => w,
        Direction::Vertical => h,
    };
    let mut counts = vec![0u64; line_len + 1];
    match direction {
        Direction::Horizontal => {
            for row in data.chunks_exact(w) {
                let mut run = 0;
                for &v in row {
                    if v {
                        run += 1;
                    } else if run > 0 {
                        counts[run] += 1;
                        run = 0;
                    }
                }
                if run > 0 {
                    counts[run] += 1;
                }
            }
        }
        Direction::Vertical => {
            // walk rows in order, keeping one open run per column
            let mut open = vec![0usize; w];
            for row in data.chunks_exact(w) {
                for (run, &v) in open.iter_mut().zip(row) {
                    if v {
                        *run += 1;
                    } else if *run > 0 {
                        counts[*run] += 1;
                        *run = 0;
                    }
                }
            }
            for run in open.into_iter().filter(|&r| r > 0) {
                counts[run] += 1;
            }
        }
    }
    RunHistogram::from_counts(counts, direction).expect("index 0 is never incremented")
}

/// Mean-filtered histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedHistogram {
    values: Vec<f64>,
    window: usize,
    support_end: usize,
    x_max: usize,
    peak: f64,
}

impl SmoothedHistogram {
    /// Smoothed values for `x = 0..len`; zero beyond.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, x: usize) -> f64 {
        self.values.get(x).copied().unwrap_or(0.0)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Last sample position of the input; beyond it the filter only sees
    /// zero padding.
    pub fn support_end(&self) -> usize {
        self.support_end
    }

    /// Smallest position of the maximum.
    pub fn x_max(&self) -> usize {
        self.x_max
    }

    pub fn peak(&self) -> f64 {
        self.peak
    }

    /// CSV with a `length,value` header and six fractional digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,value\n");
        for (x, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{x},{v:.6}");
        }
        out
    }
}

/// Mean filter of odd length `window` over samples at `x = 0..samples.len()`.
///
/// `values[x] = sum(samples[x-r ..= x+r]) / window`, with samples outside the
/// input treated as zero and the divisor fixed at `window`. Output covers
/// `x = 0 ..= len-1+r`, past which it is identically zero.
pub fn smooth(samples: &[f64], window: usize) -> Result<SmoothedHistogram> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::param(format!(
            "smoothing window must be odd and at least 1, got {window}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    if let Some(v) = samples.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::param(format!(
            "histogram samples must be finite and non-negative, got {v}"
        )));
    }
    let r = window / 2;
    let n = samples.len();
    let divisor = window as f64;
    let values: Vec<f64> = (0..n + r)
        .map(|x| {
            let lo = x.saturating_sub(r);
            let hi = (x + r).min(n - 1);
            samples[lo..=hi].iter().sum::<f64>() / divisor
        })
        .collect();

    let mut x_max = 0;
    for (x, &v) in values.iter().enumerate() {
        if v > values[x_max] {
            x_max = x;
        }
    }
    Ok(SmoothedHistogram {
        peak: values[x_max],
        values,
        window,
        support_end: n - 1,
        x_max,
    })
}

/// Diameter estimate and the diagnostics that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeEstimate {
    pub diameter: usize,
    pub alpha: f64,
    pub x_max: usize,
    pub peak: f64,
    /// The crossing lies past the last input sample, where the smoothed
    /// curve is decaying only because of zero padding.
    pub crossing_in_padding: bool,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha must be in (0,1)"))
    }
}

/// Smallest `x > x_max` with `value(x) <= alpha * peak`.
pub fn estimate_diameter(hist: &SmoothedHistogram, alpha: f64) -> Result<SizeEstimate> {
    check_alpha(alpha)?;
    if !(hist.peak > 0.0) {
        return Err(Error::DegenerateHistogram);
    }
    let limit = alpha * hist.peak;
    // value_at is zero past the stored values, so this terminates
    let diameter = (hist.x_max + 1..)
        .find(|&x| hist.value_at(x) <= limit)
        .expect("smoothed histogram has a zero tail");
    Ok(SizeEstimate {
        diameter,
        alpha,
        x_max: hist.x_max,
        peak: hist.peak,
        crossing_in_padding: diameter > hist.support_end,
    })
}

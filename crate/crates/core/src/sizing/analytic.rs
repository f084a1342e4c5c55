//! Continuous chord-length densities of ideal discs.
//!
//! A disc of diameter `d` cut by parallel lines at uniformly distributed
//! offsets produces chords whose lengths follow `x / sqrt(d^2 - x^2)` on
//! `[0, d)`, up to normalization. The density diverges as `x -> d`.

use crate::error::{Error, Result};

/// Unnormalized chord-length density of a disc of diameter `d` at length `x`.
///
/// Zero outside `[0, d)`; `x == d` is a pole and yields
/// [`Error::UnboundedDensity`].
pub fn chord_density(d: f64, x: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::param(format!("diameter must be positive, got {d}")));
    }
    if x == d {
        return Err(Error::UnboundedDensity {
            diameter: d,
            length: x,
        });
    }
    if (0.0..d).contains(&x) {
        Ok(x / (d * d - x * x).sqrt())
    } else {
        Ok(0.0)
    }
}

/// Sum of [`chord_density`] over integer diameters `d_min..=d_max`.
/// The pole term (`d == x`) is left out.
pub fn mixed_chord_density(d_min: u32, d_max: u32, x: f64) -> Result<f64> {
    if d_min == 0 || d_min > d_max {
        return Err(Error::param(format!(
            "diameter range must satisfy 1 <= d_min <= d_max, got {d_min}..{d_max}"
        )));
    }
    Ok((d_min..=d_max)
        .map(|d| chord_density(d as f64, x).unwrap_or(0.0))
        .sum())
}

/// [`mixed_chord_density`] sampled at integer lengths `0..=d_max`, ready for
/// smoothing.
pub fn sample_mixed_chord_density(d_min: u32, d_max: u32) -> Result<Vec<f64>> {
    (0..=d_max)
        .map(|x| mixed_chord_density(d_min, d_max, x as f64))
        .collect()
}

//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use objcount::{BinaryMask, GrayImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Otsu by definition: for every split recompute class weights and means
/// from the raw pixels, keep the first level with the largest
/// `w0 * w1 * (mu0 - mu1)^2`. `None` when no split has positive variance.
pub fn otsu_bruteforce(img: &GrayImage) -> Option<u8> {
    let n = img.data().len() as f64;
    let mut best: Option<(u8, f64)> = None;
    for t in 0..=255u16 {
        let (mut c0, mut s0, mut c1, mut s1) = (0f64, 0f64, 0f64, 0f64);
        for &v in img.data() {
            if v as u16 <= t {
                c0 += 1.0;
                s0 += v as f64;
            } else {
                c1 += 1.0;
                s1 += v as f64;
            }
        }
        if c0 == 0.0 || c1 == 0.0 {
            continue;
        }
        let (w0, w1) = (c0 / n, c1 / n);
        let var = w0 * w1 * (s0 / c0 - s1 / c1).powi(2);
        if var > 0.0 && best.is_none_or(|(_, b)| var > b) {
            best = Some((t as u8, var));
        }
    }
    best.map(|(t, _)| t)
}

/// Majority over the window by explicit neighbor enumeration.
pub fn median_bruteforce(mask: &BinaryMask, window: usize) -> BinaryMask {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let r = (window / 2) as i64;
    let mut out = BinaryMask::background(mask.width(), mask.height()).unwrap();
    for y in 0..h {
        for x in 0..w {
            let mut objects = 0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0 && ny >= 0 && nx < w && ny < h && mask.get(nx as u32, ny as u32) {
                        objects += 1;
                    }
                }
            }
            out.set(x as u32, y as u32, 2 * objects > window * window);
        }
    }
    out
}

/// Run lengths found by locating run starts (object pixel whose predecessor
/// is background or the border) and walking forward.
pub fn runs_naive(mask: &BinaryMask, vertical: bool) -> Vec<usize> {
    let (lines, len) = if vertical {
        (mask.width(), mask.height())
    } else {
        (mask.height(), mask.width())
    };
    let at = |line: u32, i: u32| {
        if vertical {
            mask.get(line, i)
        } else {
            mask.get(i, line)
        }
    };
    let mut runs = Vec::new();
    for line in 0..lines {
        for i in 0..len {
            if at(line, i) && (i == 0 || !at(line, i - 1)) {
                let mut j = i;
                while j < len && at(line, j) {
                    j += 1;
                }
                runs.push((j - i) as usize);
            }
        }
    }
    runs
}

pub fn random_mask(rng: &mut impl Rng, width: u32, height: u32, density: f64) -> BinaryMask {
    let data = (0..width * height).map(|_| rng.random_bool(density)).collect();
    BinaryMask::new(width, height, data).unwrap()
}

/// Random image whose values come from a random sub-range, so some images
/// have few distinct levels and many empty histogram bins.
pub fn random_image(rng: &mut impl Rng) -> GrayImage {
    let w = rng.random_range(1..=32);
    let h = rng.random_range(1..=32);
    let lo: u8 = rng.random();
    let hi: u8 = rng.random_range(lo..=255);
    let data = (0..w * h).map(|_| rng.random_range(lo..=hi)).collect();
    GrayImage::new(w, h, data).unwrap()
}

/// Disc of diameter `d` centered at `(cx, cy)` (pixel centers at +0.5).
pub fn disc_mask(width: u32, height: u32, cx: f64, cy: f64, d: f64) -> BinaryMask {
    let r2 = (d / 2.0) * (d / 2.0);
    let mut m = BinaryMask::background(width, height).unwrap();
    for y in 0..height {
        for x in 0..width {
            let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
            if dx * dx + dy * dy <= r2 {
                m.set(x, y, true);
            }
        }
    }
    m
}

/// Lengths of `n` horizontal chords of an ideal disc at uniformly random
/// vertical offsets.
pub fn monte_carlo_chords(d: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    let r = d / 2.0;
    (0..n)
        .map(|_| {
            let y: f64 = rng.random_range(-r..r);
            2.0 * (r * r - y * y).sqrt()
        })
        .collect()
}

/// Cumulative distribution of a density on `[0, d)` by midpoint quadrature,
/// normalized to 1, evaluated at `x` (the pole at `d` is never sampled).
pub fn cdf_by_quadrature(density: impl Fn(f64) -> f64, d: f64, steps: usize) -> impl Fn(f64) -> f64 {
    let h = d / steps as f64;
    let mut cum = Vec::with_capacity(steps + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for i in 0..steps {
        acc += density((i as f64 + 0.5) * h) * h;
        cum.push(acc);
    }
    let total = acc;
    move |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= d {
            return 1.0;
        }
        let pos = x / h;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        (cum[i] + frac * (cum[i + 1] - cum[i])) / total
    }
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[values.len() / 2]
}

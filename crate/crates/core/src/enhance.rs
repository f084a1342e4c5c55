//! Binary median (majority) filtering.

use crate::error::{Error, Result};
use crate::imageio::BinaryMask;

/// Window size used when none is configured.
pub const DEFAULT_MEDIAN_WINDOW: usize = 5;

fn check_window(width: usize, height: usize, window: usize) -> Result<()> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::param(format!(
            "median window must be odd and at least 1, got {window}"
        )));
    }
    if window > width.min(height) {
        return Err(Error::param(format!(
            "median window {window} exceeds image size {width}x{height}"
        )));
    }
    Ok(())
}

/// Majority vote over the `window`x`window` neighborhood of every pixel.
///
/// Neighbors outside the image count as background.
pub fn median_filter(mask: &BinaryMask, window: usize) -> Result<BinaryMask> {
    let mut out = mask.clone();
    median_filter_in_place(&mut out, window)?;
    Ok(out)
}

/// In-place form of [`median_filter`].
///
/// Keeps running per-column counts over the vertical window and slides a
/// horizontal sum across them, so each pixel costs O(1) whatever the window.
/// Rows that are still needed after being overwritten are kept in a ring of
/// `window/2 + 1` saved rows.
pub fn median_filter_in_place(mask: &mut BinaryMask, window: usize) -> Result<()> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    check_window(w, h, window)?;
    let r = window / 2;
    let majority = (window * window / 2) as u32;
    let data = mask.data_mut();

    let mut columns = vec![0u32; w];
    let mut saved = vec![false; (r + 1) * w];
    let mut row_sums = vec![0u32; w];
    for y in 0..r.min(h) {
        for (c, &v) in columns.iter_mut().zip(&data[y * w..(y + 1) * w]) {
            *c += v as u32;
        }
    }
    for y in 0..h {
        // rows below y are still original
        if y + r < h {
            for (c, &v) in columns.iter_mut().zip(&data[(y + r) * w..(y + r + 1) * w]) {
                *c += v as u32;
            }
        }
        let slot = (y % (r + 1)) * w;
        if y > r {
            // original of row y-r-1 was saved in this slot
            for (c, &v) in columns.iter_mut().zip(&saved[slot..slot + w]) {
                *c -= v as u32;
            }
        }
        let row = &mut data[y * w..(y + 1) * w];
        saved[slot..slot + w].copy_from_slice(row);

        let mut sum: u32 = columns[..r].iter().sum();
        for x in 0..w {
            if x + r < w {
                sum += columns[x + r];
            }
            if x > r {
                sum -= columns[x - r - 1];
            }
            row_sums[x] = sum;
        }
        for (px, &s) in row.iter_mut().zip(&row_sums) {
            *px = s > majority;
        }
    }
    Ok(())
}

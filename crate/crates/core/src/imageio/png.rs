use std::io::Cursor;

use png::{BitDepth, ColorType, Decoder, Transformations};

use crate::error::{Error, Result};

use super::{check_dimensions, GrayImage};

/// Integer BT.601 luma, rounded half up.
pub fn rgb_to_luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Decode an 8-bit grayscale or RGB PNG.
pub fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let mut decoder = Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Malformed(format!("png: {e}")))?;

    let info = reader.info();
    let (width, height) = (info.width, info.height);
    let (color, depth) = (info.color_type, info.bit_depth);
    check_dimensions(width as u64, height as u64)?;
    if depth != BitDepth::Eight {
        return Err(Error::UnsupportedBitDepth(format!(
            "png with {} bits per sample",
            depth as u8
        )));
    }
    if !matches!(color, ColorType::Grayscale | ColorType::Rgb) {
        return Err(Error::UnsupportedFormat(format!(
            "png color type {color:?} (expected grayscale or RGB)"
        )));
    }

    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Malformed("png: image too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Malformed(format!("png: {e}")))?;
    buf.truncate(frame.buffer_size());

    let data = match color {
        ColorType::Grayscale => buf,
        _ => buf
            .chunks_exact(3)
            .map(|p| rgb_to_luma(p[0], p[1], p[2]))
            .collect(),
    };
    GrayImage::new(width, height, data)
}

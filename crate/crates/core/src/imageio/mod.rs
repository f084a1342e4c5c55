//! Grayscale images, binary masks, and their on-disk formats.
//!
//! PGM (`P2` ASCII and `P5` binary) is the canonical format; 8-bit grayscale
//! and RGB PNG files are accepted on input. Masks are always written as `P5`
//! with object pixels at 255 and background at 0.

mod pgm;
mod png;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use self::pgm::{decode_pgm, encode_pgm};
pub use self::png::{decode_png, rgb_to_luma};

/// Largest accepted width or height.
pub const MAX_DIMENSION: u32 = 65535;

fn check_dimensions(width: u64, height: u64) -> Result<()> {
    if width == 0 || height == 0 || width > MAX_DIMENSION as u64 || height > MAX_DIMENSION as u64 {
        return Err(Error::InvalidDimensions { width, height });
    }
    Ok(())
}

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        check_dimensions(width as u64, height as u64)?;
        if data.len() != width as usize * height as usize {
            return Err(Error::param(format!(
                "pixel buffer has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(GrayImage { width, height, data })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// Segmented image: `true` marks an object pixel, `false` background.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, data: Vec<bool>) -> Result<Self> {
        check_dimensions(width as u64, height as u64)?;
        if data.len() != width as usize * height as usize {
            return Err(Error::param(format!(
                "mask buffer has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(BinaryMask { width, height, data })
    }

    pub fn background(width: u32, height: u32) -> Result<Self> {
        Self::new(width, height, vec![false; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [bool] {
        &mut self.data
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    /// Number of object pixels (`S` in the count formula).
    pub fn object_pixels(&self) -> u64 {
        self.data.iter().filter(|&&v| v).count() as u64
    }

    pub fn inverted(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| !v).collect(),
        }
    }

    /// Render as a grayscale image with the given levels.
    pub fn to_gray(&self, object: u8, background: u8) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .map(|&v| if v { object } else { background })
                .collect(),
        }
    }
}

/// Load a PGM (P2/P5) or 8-bit grayscale/RGB PNG file.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let bytes = fs::read(path.as_ref())?;
    decode_gray(&bytes)
}

/// Decode an in-memory image, dispatching on its magic bytes.
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        decode_pgm(bytes)
    } else if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(Error::UnsupportedFormat(format!(
            "netpbm variant P{} (only P2 and P5 are supported)",
            bytes[1] as char
        )))
    } else {
        Err(Error::UnsupportedFormat(
            "unrecognized file signature (expected PGM or PNG)".into(),
        ))
    }
}

/// Write `mask` as a binary PGM with object = 255 and background = 0.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    save_gray(&mask.to_gray(255, 0), path)
}

/// Write `img` as a binary (P5) PGM.
pub fn save_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), encode_pgm(img))?;
    Ok(())
}

//! Netpbm graymap reader/writer.

use crate::error::{Error, Result};

use super::{check_dimensions, GrayImage};

struct Header {
    binary: bool,
    width: u64,
    height: u64,
    maxval: u64,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Malformed(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Malformed(format!("{what} out of range")))
    }
}

fn read_header(cur: &mut Cursor<'_>) -> Result<Header> {
    let binary = match cur.bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(Error::Malformed("missing P2/P5 magic number".into())),
    };
    cur.pos = 2;
    if !cur
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::Malformed("magic number not followed by whitespace".into()));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    Ok(Header {
        binary,
        width,
        height,
        maxval,
    })
}

/// Decode a P2 or P5 graymap. Sample values are kept as stored (no rescaling
/// by maxval), so 8-bit files load losslessly.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cur = Cursor { bytes, pos: 0 };
    let header = read_header(&mut cur)?;
    if header.maxval == 0 {
        return Err(Error::Malformed("maxval must be positive".into()));
    }
    if header.maxval > 255 {
        return Err(Error::UnsupportedBitDepth(format!(
            "maxval {} needs more than 8 bits per sample",
            header.maxval
        )));
    }
    check_dimensions(header.width, header.height)?;
    let n = (header.width * header.height) as usize;

    let data = if header.binary {
        // exactly one whitespace byte separates maxval from the raster
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(Error::Malformed("missing whitespace after maxval".into())),
        }
        let raster = &bytes[cur.pos..];
        if raster.len() < n {
            return Err(Error::Malformed(format!(
                "raster truncated: {} of {} bytes",
                raster.len(),
                n
            )));
        }
        raster[..n].to_vec()
    } else {
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            let v = cur.number("sample")?;
            if v > header.maxval {
                return Err(Error::Malformed(format!(
                    "sample {v} exceeds maxval {}",
                    header.maxval
                )));
            }
            data.push(v as u8);
        }
        data
    };

    if let Some(&v) = data.iter().find(|&&v| v as u64 > header.maxval) {
        return Err(Error::Malformed(format!(
            "sample {v} exceeds maxval {}",
            header.maxval
        )));
    }
    GrayImage::new(header.width as u32, header.height as u32, data)
}

/// Encode as binary P5 with maxval 255.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

//! PGM reader and writer for 8-bit images (binary `P5` and ASCII `P2`, maxval 255).

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::img::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P2`
    Ascii,
    /// `P5`
    Binary,
}

/// Parses a PGM file held in memory, returning the image and its encoding.
pub fn decode(bytes: &[u8]) -> Result<(GrayImage, PgmFormat)> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let format = match bytes.get(..2) {
        Some(b"P5") => PgmFormat::Binary,
        Some(b"P2") => PgmFormat::Ascii,
        _ => return Err(Error::Pgm("missing P2/P5 magic number".into())),
    };
    cursor.pos = 2;
    let width = cursor.header_number("width")?;
    let height = cursor.header_number("height")?;
    let maxval = cursor.header_number("maxval")?;
    if maxval != 255 {
        return Err(Error::Pgm(format!(
            "unsupported maxval {maxval}, only 255 is accepted"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Pgm(format!("empty image {width}x{height}")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::Pgm("image dimensions overflow".into()))?;

    let data = match format {
        PgmFormat::Binary => {
            // Exactly one whitespace byte separates maxval from the raster.
            match cursor.bytes.get(cursor.pos) {
                Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
                _ => return Err(Error::Pgm("expected whitespace after maxval".into())),
            }
            let raster = &bytes[cursor.pos..];
            if raster.len() < count {
                return Err(Error::Pgm(format!(
                    "raster truncated: expected {count} bytes, found {}",
                    raster.len()
                )));
            }
            raster[..count].to_vec()
        }
        PgmFormat::Ascii => {
            let mut data = Vec::with_capacity(count);
            for _ in 0..count {
                let v = cursor.header_number("pixel")?;
                if v > 255 {
                    return Err(Error::Pgm(format!("sample {v} exceeds maxval")));
                }
                data.push(v as u8);
            }
            data
        }
    };
    Ok((GrayImage::new(width, height, data)?, format))
}

/// Serializes an image. Binary output is `P5\n<w> <h>\n255\n` followed by
/// the raster; ASCII output writes one image row per line.
pub fn encode(img: &GrayImage, format: PgmFormat) -> Vec<u8> {
    let (w, h) = img.dimensions();
    let mut out = Vec::with_capacity(img.len() * 4 + 32);
    match format {
        PgmFormat::Binary => {
            write!(out, "P5\n{w} {h}\n255\n").unwrap();
            out.extend_from_slice(img.as_raw());
        }
        PgmFormat::Ascii => {
            write!(out, "P2\n{w} {h}\n255\n").unwrap();
            for row in 0..h {
                let line = img
                    .row(row)
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                out.extend_from_slice(line.as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}

pub fn read(path: impl AsRef<Path>) -> Result<(GrayImage, PgmFormat)> {
    decode(&fs::read(path)?)
}

pub fn write(path: impl AsRef<Path>, img: &GrayImage, format: PgmFormat) -> Result<()> {
    fs::write(path, encode(img, format))?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
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

    fn header_number(&mut self, what: &str) -> Result<usize> {
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
            return Err(Error::Pgm(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Pgm(format!("{what} out of range")))
    }
}

//! Binary (P5) and ASCII (P2) PGM with maxval up to 255.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::StepImage;
use crate::error::{Error, Result};

pub fn load_image(path: impl AsRef<Path>) -> Result<StepImage> {
    let bytes = fs::read(path)?;
    decode_pgm(&bytes)
}

/// Writes a binary P5 file; gray levels are rounded and clamped to 0..=255.
pub fn save_image(image: &StepImage, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_pgm(image);
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

pub fn encode_pgm(image: &StepImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.pixels().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
    out
}

/// ASCII P2 encoding, mostly useful for tests and hand inspection.
pub fn encode_pgm_ascii(image: &StepImage) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n255\n", image.width(), image.height());
    for row in image.pixels().rows() {
        let line: Vec<String> = row.iter().map(|v| (v.round().clamp(0.0, 255.0) as u8).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

struct Header<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() && self.data[self.pos] != b'#' {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Pgm("unexpected end of header".into()));
        }
        Ok(&self.data[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Pgm(format!("invalid {what} `{}`", String::from_utf8_lossy(tok))))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<StepImage> {
    let mut header = Header { data: bytes, pos: 0 };
    let magic = header.token()?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        b"P1" | b"P3" | b"P4" | b"P6" | b"P7" => {
            return Err(Error::Pgm(format!(
                "{} is not a grayscale format",
                String::from_utf8_lossy(magic)
            )))
        }
        _ => return Err(Error::Pgm("missing P2/P5 magic number".into())),
    };
    let width = header.number("width")?;
    let height = header.number("height")?;
    let maxval = header.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Pgm("image dimensions must be positive".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::Pgm(format!("maxval {maxval} outside 1..=255")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::Pgm("image dimensions overflow".into()))?;
    let scale = 255.0 / maxval as f64;
    let raw: Vec<usize> = if binary {
        // exactly one whitespace byte separates maxval from the raster
        let start = header.pos + 1;
        let end = start
            .checked_add(count)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| Error::Pgm(format!("raster truncated: expected {count} bytes")))?;
        bytes[start..end].iter().map(|&b| b as usize).collect()
    } else {
        (0..count)
            .map(|_| header.number("gray level"))
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(&bad) = raw.iter().find(|&&v| v > maxval) {
        return Err(Error::Pgm(format!("gray level {bad} exceeds maxval {maxval}")));
    }
    let values: Vec<f64> = raw.into_iter().map(|v| v as f64 * scale).collect();
    let pixels = Array2::from_shape_vec((height, width), values).expect("shape matches count");
    StepImage::new(pixels)
}

//! Portable graymap (`P2` ASCII / `P5` binary) reading and writing.

use std::path::Path;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::io::write_atomic;

/// Decoded graymap with its declared maximum value.
#[derive(Debug, Clone, PartialEq)]
pub struct Graymap {
    pub image: GrayImage,
    pub maxval: u16,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments running to end of line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(format!("expected {what}")));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse().map_err(|_| Error::Parse {
            offset: start,
            message: format!("{what} `{text}` out of range"),
        })
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Graymap> {
    let mut cur = Cursor { bytes, pos: 0 };
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(cur.error("unsupported magic number, expected P2 or P5")),
    };
    cur.pos = 2;
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval_pos = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse {
            offset: maxval_pos,
            message: format!("maxval {maxval} outside 1..=65535"),
        });
    }
    if width == 0 || height == 0 {
        return Err(cur.error(format!("empty image {width}x{height}")));
    }
    let count = width * height;
    let mut pixels = Vec::with_capacity(count);

    if binary {
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(cur.error("expected a single whitespace byte before the payload")),
        }
        let sample_bytes = if maxval < 256 { 1 } else { 2 };
        let expected = count * sample_bytes;
        let payload = &bytes[cur.pos..];
        if payload.len() < expected {
            return Err(cur.error(format!(
                "truncated payload: expected {expected} bytes, found {}",
                payload.len()
            )));
        }
        for k in 0..count {
            let v = if sample_bytes == 1 {
                payload[k] as u64
            } else {
                u16::from_be_bytes([payload[2 * k], payload[2 * k + 1]]) as u64
            };
            if v > maxval {
                return Err(Error::Parse {
                    offset: cur.pos + k * sample_bytes,
                    message: format!("sample {v} exceeds maxval {maxval}"),
                });
            }
            pixels.push(v as f64);
        }
    } else {
        for k in 0..count {
            let v = cur.number("sample").map_err(|e| match e {
                Error::Parse { offset, .. } if offset >= bytes.len() => Error::Parse {
                    offset,
                    message: format!("truncated payload: expected {count} samples, found {k}"),
                },
                other => other,
            })?;
            if v > maxval {
                return Err(cur.error(format!("sample {v} exceeds maxval {maxval}")));
            }
            pixels.push(v as f64);
        }
    }
    let image = GrayImage::new(width, height, pixels).map_err(|e| Error::Parse {
        offset: 0,
        message: e.to_string(),
    })?;
    Ok(Graymap {
        image,
        maxval: maxval as u16,
    })
}

pub fn read_pgm(path: &Path) -> Result<Graymap> {
    let bytes =
        std::fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_pgm(&bytes).map_err(|e| match e {
        Error::Parse { offset, message } => Error::Parse {
            offset,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Loads a graymap as raw intensities (no rescaling by maxval).
pub fn load_pgm(path: &Path) -> Result<GrayImage> {
    Ok(read_pgm(path)?.image)
}

/// Binary `P5` encoding; samples are rounded and clamped to `0..=maxval`.
pub fn encode_pgm(image: &GrayImage, maxval: u16) -> Vec<u8> {
    let maxval = maxval.max(1);
    let mut out = format!("P5\n{} {}\n{}\n", image.width(), image.height(), maxval).into_bytes();
    for &p in image.pixels() {
        let v = p.round().clamp(0.0, maxval as f64) as u16;
        if maxval < 256 {
            out.push(v as u8);
        } else {
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    out
}

pub fn save_pgm(image: &GrayImage, maxval: u16, path: &Path) -> Result<()> {
    write_atomic(path, &encode_pgm(image, maxval))
}

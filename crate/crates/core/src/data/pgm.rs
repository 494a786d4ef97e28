//! Binary greyscale PGM (`P5`) with 8-bit samples.

use crate::imageops::Image;

use super::DataError;

fn bad(msg: impl Into<String>) -> DataError {
    DataError::Pgm(msg.into())
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, DataError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(bad(format!("expected {what} at byte {start}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("{what} out of range at byte {start}")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Image, DataError> {
    if !bytes.starts_with(b"P5") {
        return Err(bad("not a binary PGM (magic number P5 expected)"));
    }
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(bad(format!("image size {width}x{height} is empty")));
    }
    if maxval == 0 || maxval > 255 {
        return Err(bad(format!("maxval {maxval} outside 1..=255")));
    }
    if !h.bytes.get(h.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(bad("missing whitespace after maxval"));
    }
    let start = h.pos + 1;
    let need = width * height;
    let payload = bytes.get(start..start + need).ok_or_else(|| {
        bad(format!(
            "payload has {} bytes, expected {need}",
            bytes.len().saturating_sub(start)
        ))
    })?;
    let scale = maxval as f64;
    let pixels = payload.iter().map(|&b| f64::from(b) / scale).collect();
    Image::new(height, width, pixels).map_err(|e| bad(e.to_string()))
}

/// Encodes pixels clamped to `[0, 1]` with maxval 255.
pub fn write_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(
        img.pixels()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    out
}

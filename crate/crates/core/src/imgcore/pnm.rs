//! Binary netpbm codec: P5 (gray) and P6 (RGB), 8 bits per sample.
//!
//! Writers always emit `P5`/`P6`, a single-space separated header and
//! maxval 255. Readers accept header comments and any maxval up to 255
//! (rescaled to 0..=255).

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imgcore::raster::{BinaryImage, ColorImage, GrayImage};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pnm {
    Gray(GrayImage),
    Color(ColorImage),
}

impl Pnm {
    pub fn into_color(self) -> ColorImage {
        match self {
            Pnm::Gray(g) => ColorImage::from_gray(&g),
            Pnm::Color(c) => c,
        }
    }
}

struct HeaderReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.data.len() {
            let c = self.data[self.pos];
            if c == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Codec("expected a number in header".into()));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Codec("header number out of range".into()))
    }
}

pub fn decode(data: &[u8]) -> Result<Pnm> {
    if data.len() < 2 || data[0] != b'P' {
        return Err(Error::Codec("missing netpbm magic".into()));
    }
    let channels = match data[1] {
        b'5' => 1,
        b'6' => 3,
        m => return Err(Error::Codec(format!("unsupported netpbm type P{}", m as char))),
    };
    let mut hr = HeaderReader { data, pos: 2 };
    let width = hr.number()?;
    let height = hr.number()?;
    let maxval = hr.number()?;
    if !(1..=255).contains(&maxval) {
        return Err(Error::Codec(format!("unsupported maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if hr.pos >= data.len() || !data[hr.pos].is_ascii_whitespace() {
        return Err(Error::Codec("truncated header".into()));
    }
    let start = hr.pos + 1;
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Codec("image too large".into()))?;
    if data.len() < start + expected {
        return Err(Error::Codec(format!(
            "raster truncated: {} of {expected} bytes",
            data.len().saturating_sub(start)
        )));
    }
    let mut raster = data[start..start + expected].to_vec();
    if maxval != 255 {
        for v in &mut raster {
            *v = ((*v as u32).min(maxval as u32) * 255 / maxval as u32) as u8;
        }
    }
    if channels == 1 {
        Ok(Pnm::Gray(GrayImage::new(width, height, raster)?))
    } else {
        Ok(Pnm::Color(ColorImage::new(width, height, raster)?))
    }
}

pub fn encode_gray(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn encode_color(img: &ColorImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

/// Binary masks are stored as PGM with ink = 0 and paper = 255.
pub fn encode_binary(img: &BinaryImage) -> Vec<u8> {
    encode_gray(&img.to_gray())
}

pub fn read(path: impl AsRef<Path>) -> Result<Pnm> {
    decode(&fs::read(path)?)
}

/// Reads either P5 or P6 as RGB.
pub fn read_color(path: impl AsRef<Path>) -> Result<ColorImage> {
    Ok(read(path)?.into_color())
}

pub fn read_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    match read(path)? {
        Pnm::Gray(g) => Ok(g),
        Pnm::Color(_) => Err(Error::Codec("expected a P5 image".into())),
    }
}

/// Reads a PGM and thresholds it at 128: dark pixels become foreground.
pub fn read_binary(path: impl AsRef<Path>) -> Result<BinaryImage> {
    let g = read_gray(path)?;
    BinaryImage::new(g.width(), g.height(), g.pixels().iter().map(|&v| v < 128).collect())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

pub fn write_gray(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    write_bytes(path.as_ref(), &encode_gray(img))
}

pub fn write_color(path: impl AsRef<Path>, img: &ColorImage) -> Result<()> {
    write_bytes(path.as_ref(), &encode_color(img))
}

pub fn write_binary(path: impl AsRef<Path>, img: &BinaryImage) -> Result<()> {
    write_bytes(path.as_ref(), &encode_binary(img))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_header_bytes() {
        let g = GrayImage::new(2, 1, vec![7, 200]).unwrap();
        assert_eq!(encode_gray(&g), b"P5\n2 1\n255\n\x07\xc8".to_vec());
        let c = ColorImage::new(1, 1, vec![1, 2, 3]).unwrap();
        assert_eq!(encode_color(&c), b"P6\n1 1\n255\n\x01\x02\x03".to_vec());
    }

    #[test]
    fn comments_and_low_maxval() {
        let data = b"P5\n# made by hand\n2 1 # trailing\n15\n\x00\x0f";
        match decode(data).unwrap() {
            Pnm::Gray(g) => assert_eq!(g.pixels(), &[0, 255]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs_are_errors() {
        assert!(decode(b"").is_err());
        assert!(decode(b"P3\n1 1\n255\n0 0 0").is_err());
        assert!(decode(b"P5\n4 4\n255\n\x00").is_err());
        assert!(decode(b"P5\n1 1\n65535\n\x00\x00").is_err());
        assert!(decode(b"P5\n0 1\n255\n").is_err());
    }

    #[test]
    fn binary_uses_ink_zero() {
        let b = BinaryImage::new(2, 1, vec![true, false]).unwrap();
        assert_eq!(&encode_binary(&b)[11..], &[0, 255]);
    }

    proptest! {
        #[test]
        fn color_round_trip(w in 1usize..9, h in 1usize..9, seed in any::<u64>()) {
            let pixels: Vec<u8> = (0..3 * w * h).map(|i| (seed.wrapping_mul(i as u64 + 1) >> 7) as u8).collect();
            let img = ColorImage::new(w, h, pixels).unwrap();
            prop_assert_eq!(decode(&encode_color(&img)).unwrap(), Pnm::Color(img));
        }
    }
}

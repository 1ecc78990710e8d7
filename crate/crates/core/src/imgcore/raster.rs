//! Raster containers shared by every stage.
//!
//! All three image types are row-major with the origin at the top-left pixel.
//! `BinaryImage` stores `true` for foreground (ink), so dark text on a light
//! tag binarizes to `true`.

use crate::error::{Error, Result};
use crate::imgcore::geometry::Rect;

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    Ok(())
}

fn check_rect(r: &Rect, width: usize, height: usize) -> Result<()> {
    if !r.fits_within(width, height) {
        return Err(Error::InvalidZone(format!("rect {r:?} exceeds image bounds {width}x{height}")));
    }
    Ok(())
}

/// 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl ColorImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = 3 * width * height;
        if pixels.len() != expected {
            return Err(Error::BufferLength { expected, actual: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        check_dims(width, height)?;
        let pixels = rgb.iter().copied().cycle().take(3 * width * height).collect();
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn crop(&self, r: &Rect) -> Result<ColorImage> {
        check_rect(r, self.width, self.height)?;
        let mut pixels = Vec::with_capacity(3 * r.w * r.h);
        for y in r.y..r.y + r.h {
            let start = 3 * (y * self.width + r.x);
            pixels.extend_from_slice(&self.pixels[start..start + 3 * r.w]);
        }
        Ok(ColorImage { width: r.w, height: r.h, pixels })
    }

    /// Replicates a gray image into three identical channels.
    pub fn from_gray(gray: &GrayImage) -> ColorImage {
        let pixels = gray.pixels().iter().flat_map(|&v| [v, v, v]).collect();
        ColorImage { width: gray.width(), height: gray.height(), pixels }
    }
}

/// 8-bit single-channel intensity image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width * height;
        if pixels.len() != expected {
            return Err(Error::BufferLength { expected, actual: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self { width, height, pixels: vec![value; width * height] })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        check_dims(width, height)?;
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn crop(&self, r: &Rect) -> Result<GrayImage> {
        check_rect(r, self.width, self.height)?;
        let mut pixels = Vec::with_capacity(r.w * r.h);
        for y in r.y..r.y + r.h {
            let start = y * self.width + r.x;
            pixels.extend_from_slice(&self.pixels[start..start + r.w]);
        }
        Ok(GrayImage { width: r.w, height: r.h, pixels })
    }

    pub fn inverted(&self) -> GrayImage {
        GrayImage { width: self.width, height: self.height, pixels: self.pixels.iter().map(|&v| 255 - v).collect() }
    }
}

/// Foreground mask; `true` marks ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width * height;
        if pixels.len() != expected {
            return Err(Error::BufferLength { expected, actual: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self { width, height, pixels: vec![value; width * height] })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_dims(width, height)?;
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [bool] {
        &mut self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn count_foreground(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    pub fn crop(&self, r: &Rect) -> Result<BinaryImage> {
        check_rect(r, self.width, self.height)?;
        let mut pixels = Vec::with_capacity(r.w * r.h);
        for y in r.y..r.y + r.h {
            let start = y * self.width + r.x;
            pixels.extend_from_slice(&self.pixels[start..start + r.w]);
        }
        Ok(BinaryImage { width: r.w, height: r.h, pixels })
    }

    pub fn complement(&self) -> BinaryImage {
        BinaryImage { width: self.width, height: self.height, pixels: self.pixels.iter().map(|&p| !p).collect() }
    }

    /// `true` when every foreground pixel of `self` is also foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.pixels.iter().zip(&other.pixels).all(|(&a, &b)| !a || b)
    }

    pub fn flipped_vertical(&self) -> BinaryImage {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for y in (0..self.height).rev() {
            pixels.extend_from_slice(&self.pixels[y * self.width..(y + 1) * self.width]);
        }
        BinaryImage { width: self.width, height: self.height, pixels }
    }

    /// Foreground as 0 (ink) / 255 (paper) gray, the on-disk PGM convention.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| if p { 0 } else { 255 }).collect(),
        }
    }
}

/// BT.601 luma, rounded half up.
pub fn to_gray(img: &ColorImage) -> GrayImage {
    let pixels = img
        .pixels
        .chunks_exact(3)
        .map(|p| {
            let weighted = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
            ((weighted + 500) / 1000).min(255) as u8
        })
        .collect();
    GrayImage { width: img.width, height: img.height, pixels }
}

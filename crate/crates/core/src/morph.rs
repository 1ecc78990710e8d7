//! Binary morphology with centered square structuring elements.
//!
//! Pixels outside the image count as background for both erosion and
//! dilation. A square element is separable, so each operation is a
//! horizontal pass followed by a vertical pass with running counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructElem {
    side: usize,
}

impl StructElem {
    pub fn square(side: usize) -> Result<Self> {
        if side == 0 || side.is_multiple_of(2) {
            return Err(Error::Config(format!("structuring element side {side} must be odd and positive")));
        }
        Ok(Self { side })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn radius(&self) -> usize {
        self.side / 2
    }

    /// Side scaled with the expected digit height: `max(3, odd(round(h / 12)))`.
    pub fn for_digit_height(digit_h: f64) -> Self {
        let n = (digit_h / 12.0).round().max(3.0) as usize;
        Self { side: if n % 2 == 1 { n } else { n + 1 } }
    }
}

#[derive(Clone, Copy)]
enum Mode {
    Erode,
    Dilate,
}

/// One separable pass over a line of `len` samples with stride `step`.
fn pass_line(src: &[bool], dst: &mut [bool], start: usize, step: usize, len: usize, r: usize, mode: Mode) {
    // Running count of foreground samples inside [i - r, i + r] ∩ [0, len).
    let mut count = 0usize;
    for j in 0..r.min(len) {
        count += src[start + j * step] as usize;
    }
    let full = 2 * r + 1;
    for i in 0..len {
        let add = i + r;
        if add < len {
            count += src[start + add * step] as usize;
        }
        if i > r {
            count -= src[start + (i - r - 1) * step] as usize;
        }
        dst[start + i * step] = match mode {
            // Out-of-range samples are background, so the full window must be
            // inside the line and entirely foreground.
            Mode::Erode => i >= r && add < len && count == full,
            Mode::Dilate => count > 0,
        };
    }
}

fn separable(img: &BinaryImage, se: &StructElem, mode: Mode) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    let r = se.radius();
    if r == 0 {
        return img.clone();
    }
    let src = img.pixels();
    let mut tmp = vec![false; w * h];
    for y in 0..h {
        pass_line(src, &mut tmp, y * w, 1, w, r, mode);
    }
    let mut out = vec![false; w * h];
    for x in 0..w {
        pass_line(&tmp, &mut out, x, w, h, r, mode);
    }
    BinaryImage::new(w, h, out).expect("same dimensions as input")
}

pub fn erode(img: &BinaryImage, se: &StructElem) -> BinaryImage {
    separable(img, se, Mode::Erode)
}

pub fn dilate(img: &BinaryImage, se: &StructElem) -> BinaryImage {
    separable(img, se, Mode::Dilate)
}

/// Erosion followed by dilation: removes foreground smaller than the element.
pub fn open(img: &BinaryImage, se: &StructElem) -> BinaryImage {
    dilate(&erode(img, se), se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(img: &BinaryImage, se: &StructElem, erode_mode: bool) -> BinaryImage {
        let r = se.radius() as isize;
        let (w, h) = (img.width() as isize, img.height() as isize);
        BinaryImage::from_fn(img.width(), img.height(), |x, y| {
            let mut all = true;
            let mut any = false;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (xx, yy) = (x as isize + dx, y as isize + dy);
                    let v = xx >= 0 && yy >= 0 && xx < w && yy < h && img.get(xx as usize, yy as usize);
                    all &= v;
                    any |= v;
                }
            }
            if erode_mode {
                all
            } else {
                any
            }
        })
        .unwrap()
    }

    fn block(w: usize, h: usize, x0: usize, y0: usize, bw: usize, bh: usize) -> BinaryImage {
        BinaryImage::from_fn(w, h, |x, y| x >= x0 && x < x0 + bw && y >= y0 && y < y0 + bh).unwrap()
    }

    #[test]
    fn erode_full_image_loses_border() {
        let img = BinaryImage::filled(6, 5, true).unwrap();
        let out = erode(&img, &StructElem::square(3).unwrap());
        for y in 0..5 {
            for x in 0..6 {
                assert_eq!(out.get(x, y), x > 0 && x < 5 && y > 0 && y < 4);
            }
        }
    }

    #[test]
    fn erode_small_shapes() {
        let se = StructElem::square(3).unwrap();
        assert_eq!(erode(&block(7, 7, 3, 3, 1, 1), &se).count_foreground(), 0);
        assert_eq!(erode(&block(10, 10, 3, 3, 4, 4), &se), block(10, 10, 4, 4, 2, 2));
    }

    #[test]
    fn dilate_point_and_empty() {
        let se = StructElem::square(3).unwrap();
        let empty = BinaryImage::filled(8, 8, false).unwrap();
        assert_eq!(dilate(&empty, &se), empty);
        assert_eq!(dilate(&block(10, 10, 5, 5, 1, 1), &se), block(10, 10, 4, 4, 3, 3));
    }

    #[test]
    fn open_removes_specks_and_keeps_blocks() {
        let se = StructElem::square(3).unwrap();
        let mut img = block(20, 20, 5, 5, 10, 10);
        img.set(1, 1, true);
        img.set(18, 2, true);
        assert_eq!(open(&img, &se), block(20, 20, 5, 5, 10, 10));
    }

    #[test]
    fn open_erases_thin_strokes() {
        // One-pixel-wide strokes, the way a degraded digit breaks apart.
        let se = StructElem::square(3).unwrap();
        let img = BinaryImage::from_fn(30, 30, |x, y| x == 10 || y == 20 || x + y == 35).unwrap();
        assert_eq!(open(&img, &se).count_foreground(), 0);
    }

    #[test]
    fn side_scaled_from_digit_height() {
        assert_eq!(StructElem::for_digit_height(20.0).side(), 3);
        assert_eq!(StructElem::for_digit_height(84.0).side(), 7);
        assert_eq!(StructElem::for_digit_height(96.0).side(), 9);
        assert!(StructElem::square(4).is_err());
    }

    fn random_image(seed: u64, w: usize, h: usize, density: u64) -> BinaryImage {
        let mut s = seed | 1;
        BinaryImage::from_fn(w, h, |_, _| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s % 100 < density
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn matches_brute_force(seed in any::<u64>(), side in prop::sample::select(vec![1usize, 3, 5, 7]), density in 20u64..90) {
            let img = random_image(seed, 23, 19, density);
            let se = StructElem::square(side).unwrap();
            prop_assert_eq!(erode(&img, &se), brute(&img, &se, true));
            prop_assert_eq!(dilate(&img, &se), brute(&img, &se, false));
        }

        #[test]
        fn opening_laws(seed in any::<u64>(), density in 30u64..95) {
            let se = StructElem::square(3).unwrap();
            let img = random_image(seed, 24, 24, density);
            let opened = open(&img, &se);
            prop_assert!(opened.is_subset_of(&img));
            prop_assert_eq!(open(&opened, &se), opened.clone());
            let mut bigger = img.clone();
            for (i, p) in bigger.pixels_mut().iter_mut().enumerate() {
                if i % 7 == 0 { *p = true; }
            }
            prop_assert!(opened.is_subset_of(&open(&bigger, &se)));
        }
    }
}

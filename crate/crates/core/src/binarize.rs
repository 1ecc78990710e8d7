//! Niblack local adaptive binarization.
//!
//! The threshold at each pixel is `mean + k * stddev` over a rectangular
//! window centered on it, clipped to the image. Window statistics come from
//! an [`IntegralImage`], so cost is independent of window size.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{BinaryImage, GrayImage, IntegralImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// Ink darker than the paper; foreground where `pixel < T`.
    DarkText,
    /// Ink lighter than the paper; foreground where `pixel > T`.
    LightText,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NiblackParams {
    pub k: f64,
    pub win_w: usize,
    pub win_h: usize,
    pub polarity: Polarity,
    /// Windows whose standard deviation falls below this are forced to
    /// background. Zero gives the unmodified Niblack rule.
    #[serde(default)]
    pub min_stddev: f64,
}

impl NiblackParams {
    pub fn new(k: f64, win_w: usize, win_h: usize, polarity: Polarity) -> Result<Self> {
        let p = Self { k, win_w, win_h, polarity, min_stddev: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn with_min_stddev(mut self, min_stddev: f64) -> Self {
        self.min_stddev = min_stddev;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let odd_ok = |n: usize| n >= 3 && n % 2 == 1;
        if !odd_ok(self.win_w) || !odd_ok(self.win_h) {
            return Err(Error::Config(format!(
                "Niblack window {}x{} must be odd and at least 3",
                self.win_w, self.win_h
            )));
        }
        if !(-1.0..=1.0).contains(&self.k) {
            return Err(Error::Config(format!("Niblack k = {} outside [-1, 1]", self.k)));
        }
        if !(self.min_stddev >= 0.0 && self.min_stddev.is_finite()) {
            return Err(Error::Config("min_stddev must be a finite non-negative value".into()));
        }
        Ok(())
    }
}

/// Expected price-digit size in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DigitSizeEstimate {
    pub digit_h: f64,
    pub digit_w: f64,
}

impl DigitSizeEstimate {
    pub fn new(digit_h: f64, digit_w: f64) -> Result<Self> {
        if !(digit_h >= 4.0 && digit_w >= 4.0 && digit_w < digit_h) {
            return Err(Error::Config(format!(
                "digit size {digit_w}x{digit_h} must be at least 4 px and taller than wide"
            )));
        }
        Ok(Self { digit_h, digit_w })
    }
}

/// Window height multiplier: a little more than one digit.
pub const WINDOW_HEIGHT_FACTOR: f64 = 1.2;
/// Window width multiplier: several digits.
pub const WINDOW_WIDTH_FACTOR: f64 = 3.0;

fn odd(n: usize) -> usize {
    if n % 2 == 1 {
        n
    } else {
        n + 1
    }
}

pub fn derive_window(est: &DigitSizeEstimate) -> (usize, usize) {
    derive_window_scaled(est, WINDOW_WIDTH_FACTOR, WINDOW_HEIGHT_FACTOR)
}

/// `(win_w, win_h)` from custom multipliers; both at least 3 and odd.
pub fn derive_window_scaled(est: &DigitSizeEstimate, width_factor: f64, height_factor: f64) -> (usize, usize) {
    let w = odd((width_factor * est.digit_w).round().max(3.0) as usize);
    let h = odd((height_factor * est.digit_h).round().max(3.0) as usize);
    (w, h)
}

/// Binarizes `img` with precomputed integral tables of the same image.
///
/// The test `pixel < mean + k * stddev` is evaluated as
/// `pixel * n - sum < k * sqrt(n * sq_sum - sum^2)`, which is algebraically
/// identical and exact in its integer parts, so inverting the image and
/// negating `k` with flipped polarity reproduces the same mask bit for bit.
pub fn niblack_with_integral(img: &GrayImage, ii: &IntegralImage, p: &NiblackParams) -> BinaryImage {
    // n*q and s*s stay below 255^2 * n^2, which fits i64 for any window
    // of at most 11M pixels.
    if img.width() * img.height() <= 11_000_000 {
        match negative_k(p) {
            true => niblack_rows::<i64, true>(img, ii, p),
            false => niblack_rows::<i64, false>(img, ii, p),
        }
    } else {
        match negative_k(p) {
            true => niblack_rows::<i128, true>(img, ii, p),
            false => niblack_rows::<i128, false>(img, ii, p),
        }
    }
}

trait Acc: Copy + PartialOrd + std::ops::Mul<Output = Self> + std::ops::Sub<Output = Self> {
    const ZERO: Self;
    fn from_u64(v: u64) -> Self;
    fn to_f64(self) -> f64;
}

impl Acc for i64 {
    const ZERO: Self = 0;
    #[inline]
    fn from_u64(v: u64) -> Self {
        v as i64
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Acc for i128 {
    const ZERO: Self = 0;
    #[inline]
    fn from_u64(v: u64) -> Self {
        v as i128
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// Sign of k after folding in the polarity.
fn negative_k(p: &NiblackParams) -> bool {
    let sign = if p.polarity == Polarity::DarkText { 1.0 } else { -1.0 };
    sign * p.k < 0.0
}

fn niblack_rows<T: Acc, const NEG_K: bool>(img: &GrayImage, ii: &IntegralImage, p: &NiblackParams) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    let (rx, ry) = (p.win_w / 2, p.win_h / 2);
    let min_var = p.min_stddev * p.min_stddev;
    // dev < k*sqrt(S) is decided on squares; light text flips both signs.
    let sign = if p.polarity == Polarity::DarkText { 1.0 } else { -1.0 };
    let k = sign * p.k;
    let k2 = k * k;
    // `floor` is the minimum spread n^2 * min_stddev^2.
    let decide = |v: u8, nt: T, floor: f64, s: u64, q: u64| -> bool {
        let st = T::from_u64(s);
        let spread = nt * T::from_u64(q) - st * st;
        let spread = if spread > T::ZERO { spread.to_f64() } else { 0.0 };
        let varied = spread >= floor;
        let dev = sign * (T::from_u64(v as u64) * nt - st).to_f64();
        let d2 = dev * dev;
        let kk = k2 * spread;
        let below = dev < 0.0;
        let hit = if NEG_K { below & (d2 > kk) } else { below | (d2 < kk) };
        varied & hit
    };
    let floor_of = |n: u64| if min_var > 0.0 { min_var * (n as f64) * (n as f64) } else { f64::NEG_INFINITY };
    let src = img.pixels();
    let mut out = vec![false; w * h];
    // Column sums over the current row band.
    let mut cs = vec![0u64; w + 1];
    let mut cq = vec![0u64; w + 1];
    let span = 2 * rx + 1;

    for y in 0..h {
        let y0 = y.saturating_sub(ry);
        let y1 = (y + ry + 1).min(h);
        let ny = (y1 - y0) as u64;
        let (s0, q0) = ii.table_rows(y0);
        let (s1, q1) = ii.table_rows(y1);
        for (((c, d), a), b) in cs.iter_mut().zip(cq.iter_mut()).zip(s1.iter().zip(s0)).zip(q1.iter().zip(q0)) {
            *c = a.0 - a.1;
            *d = b.0 - b.1;
        }
        let row = &src[y * w..(y + 1) * w];
        let out_row = &mut out[y * w..(y + 1) * w];
        let edge = |x: usize| {
            let x0 = x.saturating_sub(rx);
            let x1 = (x + rx + 1).min(w);
            let n = (x1 - x0) as u64 * ny;
            decide(row[x], T::from_u64(n), floor_of(n), cs[x1] - cs[x0], cq[x1] - cq[x0])
        };
        if span >= w {
            for (x, o) in out_row.iter_mut().enumerate() {
                *o = edge(x);
            }
            continue;
        }
        for x in (0..rx).chain(w - rx..w) {
            out_row[x] = edge(x);
        }
        let n = span as u64 * ny;
        let (nt, floor) = (T::from_u64(n), floor_of(n));
        let inner = w - 2 * rx;
        let lo_s = &cs[..inner];
        let hi_s = &cs[span..span + inner];
        let lo_q = &cq[..inner];
        let hi_q = &cq[span..span + inner];
        for (i, o) in out_row[rx..w - rx].iter_mut().enumerate() {
            *o = decide(row[rx + i], nt, floor, hi_s[i] - lo_s[i], hi_q[i] - lo_q[i]);
        }
    }
    BinaryImage::new(w, h, out).expect("dimensions come from a valid image")
}

thread_local! {
    static SCRATCH: RefCell<Option<IntegralImage>> = const { RefCell::new(None) };
}

/// Builds the integral image in a per-thread buffer that survives calls.
pub fn niblack(img: &GrayImage, p: &NiblackParams) -> BinaryImage {
    SCRATCH.with(|cell| {
        let mut slot = cell.borrow_mut();
        let ii = match slot.as_mut() {
            Some(ii) => {
                ii.rebuild(img);
                ii
            }
            None => slot.insert(IntegralImage::new(img)),
        };
        niblack_with_integral(img, ii, p)
    })
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{ColorImage, Point, Quad};

/// Image degradations; `None` (or zero) leaves the image untouched.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DegradationParams {
    pub blur_sigma: Option<f64>,
    pub noise_sigma: Option<f64>,
    /// Contrast factor around mid gray, in `(0, 1]`.
    pub contrast: Option<f64>,
    /// Brightness added across the image, growing linearly from left to right.
    pub flare: Option<f64>,
    /// Counter-clockwise rotation in degrees.
    pub rotation_deg: Option<f64>,
}

/// Fill for pixels rotated in from outside the canvas.
pub const ROTATION_FILL: [u8; 3] = [96, 96, 96];

impl DegradationParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: Option<f64>| v.is_none_or(|v| v.is_finite() && v >= 0.0);
        if !nonneg(self.blur_sigma) || !nonneg(self.noise_sigma) || !nonneg(self.flare) {
            return Err(Error::Config("degradation magnitudes must be finite and non-negative".into()));
        }
        if self.contrast.is_some_and(|c| !(c > 0.0 && c <= 1.0)) {
            return Err(Error::Config("contrast factor must lie in (0, 1]".into()));
        }
        if self.rotation_deg.is_some_and(|r| r.is_nan() || r.abs() > 15.0) {
            return Err(Error::Config("rotation must lie within 15 degrees".into()));
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        let off = |v: Option<f64>| v.is_none_or(|v| v == 0.0);
        off(self.blur_sigma)
            && off(self.noise_sigma)
            && off(self.flare)
            && off(self.rotation_deg)
            && self.contrast.is_none_or(|c| c == 1.0)
    }
}

fn image_center(w: usize, h: usize) -> Point {
    Point::new(w as f64 / 2.0, h as f64 / 2.0)
}

/// The quad a rotation by `deg` about the image center moves `q` to.
pub fn rotate_quad(q: &Quad, deg: f64, w: usize, h: usize) -> Quad {
    q.rotated_about(image_center(w, h), deg.to_radians())
}

fn rotate(img: &ColorImage, deg: f64) -> Vec<f32> {
    let (w, h) = (img.width(), img.height());
    let c = image_center(w, h);
    let (s, co) = (-deg.to_radians()).sin_cos();
    let src = img.pixels();
    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            // Inverse map: rotate the output pixel center back by -deg.
            let (dx, dy) = (x as f64 + 0.5 - c.x, y as f64 + 0.5 - c.y);
            let sx = c.x + dx * co + dy * s - 0.5;
            let sy = c.y - dx * s + dy * co - 0.5;
            if sx < -0.5 || sy < -0.5 || sx > w as f64 - 0.5 || sy > h as f64 - 0.5 {
                out.extend(ROTATION_FILL.map(f32::from));
                continue;
            }
            let x0 = sx.floor().clamp(0.0, (w - 1) as f64) as usize;
            let y0 = sy.floor().clamp(0.0, (h - 1) as f64) as usize;
            let x1 = (x0 + 1).min(w - 1);
            let y1 = (y0 + 1).min(h - 1);
            let fx = (sx - x0 as f64).clamp(0.0, 1.0);
            let fy = (sy - y0 as f64).clamp(0.0, 1.0);
            for ch in 0..3 {
                let p = |xx: usize, yy: usize| src[(yy * w + xx) * 3 + ch] as f64;
                let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
                let bot = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
                out.push((top * (1.0 - fy) + bot * fy) as f32);
            }
        }
    }
    out
}

fn gaussian_kernel(sigma: f64) -> Vec<f32> {
    let r = (3.0 * sigma).ceil().max(1.0) as isize;
    let k: Vec<f64> = (-r..=r).map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp()).collect();
    let sum: f64 = k.iter().sum();
    k.into_iter().map(|v| (v / sum) as f32).collect()
}

/// Separable Gaussian blur with edge clamping on an interleaved RGB buffer.
fn blur(buf: &mut [f32], w: usize, h: usize, sigma: f64) {
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as isize;
    let mut tmp = vec![0f32; buf.len()];
    for y in 0..h {
        for x in 0..w {
            for ch in 0..3 {
                let mut acc = 0f32;
                for (i, kv) in k.iter().enumerate() {
                    let xx = (x as isize + i as isize - r).clamp(0, w as isize - 1) as usize;
                    acc += kv * buf[(y * w + xx) * 3 + ch];
                }
                tmp[(y * w + x) * 3 + ch] = acc;
            }
        }
    }
    for y in 0..h {
        for x in 0..w {
            for ch in 0..3 {
                let mut acc = 0f32;
                for (i, kv) in k.iter().enumerate() {
                    let yy = (y as isize + i as isize - r).clamp(0, h as isize - 1) as usize;
                    acc += kv * tmp[(yy * w + x) * 3 + ch];
                }
                buf[(y * w + x) * 3 + ch] = acc;
            }
        }
    }
}

/// Applies, in order: rotation (bilinear, gray fill), contrast around 128,
/// flare gradient, Gaussian blur and additive Gaussian noise drawn from a
/// ChaCha8 stream seeded with `seed`; the result is rounded and clamped.
pub fn degrade(img: &ColorImage, d: &DegradationParams, seed: u64) -> ColorImage {
    if d.is_identity() {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let mut buf: Vec<f32> = match d.rotation_deg {
        Some(deg) if deg != 0.0 => rotate(img, deg),
        _ => img.pixels().iter().map(|&v| v as f32).collect(),
    };
    if let Some(c) = d.contrast.filter(|&c| c != 1.0) {
        let c = c as f32;
        for v in buf.iter_mut() {
            *v = 128.0 + c * (*v - 128.0);
        }
    }
    if let Some(a) = d.flare.filter(|&a| a != 0.0) {
        let span = (w.max(2) - 1) as f32;
        for y in 0..h {
            for x in 0..w {
                let add = a as f32 * x as f32 / span;
                for ch in 0..3 {
                    buf[(y * w + x) * 3 + ch] += add;
                }
            }
        }
    }
    if let Some(s) = d.blur_sigma.filter(|&s| s > 0.0) {
        blur(&mut buf, w, h, s);
    }
    if let Some(s) = d.noise_sigma.filter(|&s| s > 0.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = Normal::new(0.0f32, s as f32).expect("sigma is positive");
        for v in buf.iter_mut() {
            *v += n.sample(&mut rng);
        }
    }
    let px = buf.into_iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect();
    ColorImage::new(w, h, px).expect("dimensions unchanged")
}

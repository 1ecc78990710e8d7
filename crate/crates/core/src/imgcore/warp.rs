//! Quadrangle-to-rectangle resampling.

use crate::error::{Error, Result};
use crate::imgcore::geometry::{Point, Quad};
use crate::imgcore::raster::ColorImage;

const BOUNDS_EPS: f64 = 1e-6;

/// Bilinear sample at a continuous coordinate (pixel centers at `i + 0.5`),
/// clamping at the image edge.
#[inline]
pub fn sample_bilinear(img: &ColorImage, p: Point) -> [u8; 3] {
    let fx = (p.x - 0.5).clamp(0.0, (img.width() - 1) as f64);
    let fy = (p.y - 0.5).clamp(0.0, (img.height() - 1) as f64);
    let x0 = fx.floor() as usize;
    let y0 = fy.floor() as usize;
    let x1 = (x0 + 1).min(img.width() - 1);
    let y1 = (y0 + 1).min(img.height() - 1);
    let ax = fx - x0 as f64;
    let ay = fy - y0 as f64;
    let (p00, p10, p01, p11) = (img.get(x0, y0), img.get(x1, y0), img.get(x0, y1), img.get(x1, y1));
    let mut out = [0u8; 3];
    for c in 0..3 {
        let top = p00[c] as f64 * (1.0 - ax) + p10[c] as f64 * ax;
        let bottom = p01[c] as f64 * (1.0 - ax) + p11[c] as f64 * ax;
        out[c] = (top * (1.0 - ay) + bottom * ay).round().clamp(0.0, 255.0) as u8;
    }
    out
}

/// Point of `q` at normalized coordinates `(s, t)` of the bilinear patch
/// spanned by its corners.
#[inline]
pub fn quad_point(q: &Quad, s: f64, t: f64) -> Point {
    let [a, b, c, d] = q.corners;
    let x = (1.0 - s) * (1.0 - t) * a.x + s * (1.0 - t) * b.x + s * t * c.x + (1.0 - s) * t * d.x;
    let y = (1.0 - s) * (1.0 - t) * a.y + s * (1.0 - t) * b.y + s * t * c.y + (1.0 - s) * t * d.y;
    Point::new(x, y)
}

pub fn validate_quad(q: &Quad, width: usize, height: usize) -> Result<()> {
    if !q.is_simple() {
        return Err(Error::InvalidZone("quadrangle is degenerate or self-intersecting".into()));
    }
    let (w, h) = (width as f64, height as f64);
    for p in &q.corners {
        if !(p.x.is_finite() && p.y.is_finite())
            || p.x < -BOUNDS_EPS
            || p.y < -BOUNDS_EPS
            || p.x > w + BOUNDS_EPS
            || p.y > h + BOUNDS_EPS
        {
            return Err(Error::InvalidZone(format!("corner ({:.2}, {:.2}) outside {width}x{height}", p.x, p.y)));
        }
    }
    Ok(())
}

/// Resamples the region bounded by `q` into an `out_w x out_h` image. An
/// axis-aligned quad of exactly `out_w x out_h` reproduces a plain crop.
pub fn warp_quad_to_rect(img: &ColorImage, q: &Quad, out_w: usize, out_h: usize) -> Result<ColorImage> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidDimensions { width: out_w, height: out_h });
    }
    validate_quad(q, img.width(), img.height())?;
    let mut out = ColorImage::filled(out_w, out_h, [0, 0, 0])?;
    for v in 0..out_h {
        let t = (v as f64 + 0.5) / out_h as f64;
        for u in 0..out_w {
            let s = (u as f64 + 0.5) / out_w as f64;
            out.set(u, v, sample_bilinear(img, quad_point(q, s, t)));
        }
    }
    Ok(out)
}

//! Skew estimation on the binarized price zone and zone compensation.
//!
//! Positive angles are counter-clockwise as seen on screen: a text line at
//! `+a` rises to the right.

pub mod fht;

use serde::{Deserialize, Serialize};

use crate::imgcore::{BinaryImage, Point, Quad, Rect};
pub use fht::{fht_horizontal, fht_horizontal_limited, FhtAccumulator};

pub const DEFAULT_MAX_SKEW_DEG: f64 = 15.0;
pub const DEFAULT_SKEW_THRESHOLD_DEG: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angle {
    pub degrees: f64,
}

impl Angle {
    pub const ZERO: Angle = Angle { degrees: 0.0 };

    pub fn from_degrees(degrees: f64) -> Self {
        Self { degrees }
    }

    pub fn radians(&self) -> f64 {
        self.degrees.to_radians()
    }
}

/// Sum of squared line sums over one shear; the column total is the same for
/// every shear, so this ranks shears exactly as the column variance does.
fn projection_energy(column: &[u32]) -> u64 {
    column.iter().map(|&v| (v as u64) * (v as u64)).sum()
}

/// Skew of the foreground inside `zone`, searched over `|angle| <= max_deg`
/// in steps of one pixel of rise across the padded zone width.
///
/// The chosen shear maximizes the variance of its line sums: text rows
/// aligned with the line family concentrate ink into few lines. Ties go to
/// the smaller rise, then to the downward family.
pub fn estimate_skew(img: &BinaryImage, zone: &Rect, max_deg: f64) -> Angle {
    let Ok(crop) = img.crop(zone) else {
        return Angle::ZERO;
    };
    if crop.count_foreground() == 0 {
        return Angle::ZERO;
    }
    let n = fht::padded_width(crop.width());
    if n < 2 {
        return Angle::ZERO;
    }
    let span = (n - 1) as f64;
    let max_deg = max_deg.clamp(0.0, 20.0);
    let max_shift = ((max_deg.to_radians().tan() * span).floor() as usize).min(n - 1);

    let down = fht::fht_horizontal_limited(&crop, max_shift);
    let up = fht::fht_horizontal_limited(&crop.flipped_vertical(), max_shift);

    // (energy, -shift, prefer-down) ordering; shift 0 only counted once.
    let mut best: Option<(u64, usize, bool)> = None;
    for s in 0..down.shifts() {
        for (acc, is_down) in [(&down, true), (&up, false)] {
            if s == 0 && !is_down {
                continue;
            }
            let e = projection_energy(acc.column(s));
            let better = match best {
                None => true,
                Some((be, bs, _)) => e > be || (e == be && s < bs),
            };
            if better {
                best = Some((e, s, is_down));
            }
        }
    }
    let Some((_, s, is_down)) = best else {
        return Angle::ZERO;
    };
    let deg = (s as f64 / span).atan().to_degrees();
    Angle::from_degrees(if is_down { -deg } else { deg })
}

/// Turns the axis-aligned zone into a quadrangle aligned with the text when
/// the skew exceeds `threshold_deg`.
///
/// Below (or at) the threshold the rect's corners come back unchanged.
/// Otherwise the corners are rotated about the rect center so the top edge
/// follows the text baseline; a quad that would leave the image is shifted,
/// then shrunk about its center, until it fits.
pub fn compensate(r: &Rect, a: Angle, threshold_deg: f64, img_w: usize, img_h: usize) -> Quad {
    let base = Quad::from_rect(r);
    if a.degrees.abs() <= threshold_deg {
        return base;
    }
    fit_inside(base.rotated_about(r.center(), a.radians()), img_w as f64, img_h as f64)
}

pub(crate) fn fit_inside(q: Quad, w: f64, h: f64) -> Quad {
    let (x0, y0, x1, y1) = q.bounds();
    let mut dx = 0.0;
    let mut dy = 0.0;
    if x0 < 0.0 {
        dx = -x0;
    } else if x1 > w {
        dx = w - x1;
    }
    if y0 < 0.0 {
        dy = -y0;
    } else if y1 > h {
        dy = h - y1;
    }
    let q = q.translated(dx, dy);
    let (x0, y0, x1, y1) = q.bounds();
    if x0 >= 0.0 && y0 >= 0.0 && x1 <= w && y1 <= h {
        return q;
    }
    // Larger than the image along some axis: shrink about the center of the
    // image-clipped bounds.
    let c = Point::new(((x0.max(0.0)) + x1.min(w)) / 2.0, (y0.max(0.0) + y1.min(h)) / 2.0);
    let mut f: f64 = 1.0;
    for p in &q.corners {
        let (ex, ey) = (p.x - c.x, p.y - c.y);
        if ex > 0.0 {
            f = f.min((w - c.x) / ex);
        } else if ex < 0.0 {
            f = f.min(-c.x / ex);
        }
        if ey > 0.0 {
            f = f.min((h - c.y) / ey);
        } else if ey < 0.0 {
            f = f.min(-c.y / ey);
        }
    }
    Quad::new(q.corners.map(|p| Point::new(c.x + (p.x - c.x) * f, c.y + (p.y - c.y) * f)))
}

/// Tightest quad aligned with angle `a` around the given pixel centers.
/// Returns `None` for an empty point set.
pub fn oriented_bounds(points: impl IntoIterator<Item = Point>, a: Angle) -> Option<Quad> {
    let (s, c) = a.radians().sin_cos();
    // Baseline direction u = (c, -s); "down" direction v = (s, c).
    let mut lo_u = f64::INFINITY;
    let mut hi_u = f64::NEG_INFINITY;
    let mut lo_v = f64::INFINITY;
    let mut hi_v = f64::NEG_INFINITY;
    let mut any = false;
    for p in points {
        any = true;
        let u = p.x * c - p.y * s;
        let v = p.x * s + p.y * c;
        lo_u = lo_u.min(u - 0.5);
        hi_u = hi_u.max(u + 0.5);
        lo_v = lo_v.min(v - 0.5);
        hi_v = hi_v.max(v + 0.5);
    }
    if !any {
        return None;
    }
    let back = |u: f64, v: f64| Point::new(u * c + v * s, -u * s + v * c);
    Some(Quad::new([back(lo_u, lo_v), back(hi_u, lo_v), back(hi_u, hi_v), back(lo_u, hi_v)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Text-like block: several rows of "words" rotated by `deg` about the
    /// image center.
    pub(crate) fn text_block(w: usize, h: usize, deg: f64) -> BinaryImage {
        let c = Point::new(w as f64 / 2.0, h as f64 / 2.0);
        let rad = deg.to_radians();
        BinaryImage::from_fn(w, h, |x, y| {
            let p = Point::new(x as f64 + 0.5, y as f64 + 0.5).rotated_about(c, -rad);
            let (px, py) = (p.x - c.x, p.y - c.y);
            if px.abs() > w as f64 * 0.35 || py.abs() > h as f64 * 0.3 {
                return false;
            }
            let row = ((py + 1000.0) / 14.0) as i64;
            let in_line = (py + 1000.0).rem_euclid(14.0) < 8.0;
            let word_gap = ((px + 1000.0 + row as f64 * 13.0).rem_euclid(37.0)) < 5.0;
            in_line && !word_gap
        })
        .unwrap()
    }

    #[test]
    fn horizontal_stripes_are_level() {
        let img = text_block(300, 120, 0.0);
        let a = estimate_skew(&img, &Rect::new(0, 0, 300, 120), 15.0);
        assert_eq!(a.degrees, 0.0);
    }

    #[test]
    fn rotated_stripes_round_trip() {
        for deg in [-10.0, -5.0, -2.0, 2.0, 5.0, 10.0] {
            let img = text_block(400, 200, deg);
            let a = estimate_skew(&img, &Rect::new(0, 0, 400, 200), 15.0);
            assert!((a.degrees - deg).abs() <= 0.5, "{deg} -> {}", a.degrees);
        }
    }

    #[test]
    fn empty_zone_is_level() {
        let img = BinaryImage::filled(50, 20, false).unwrap();
        assert_eq!(estimate_skew(&img, &Rect::new(0, 0, 50, 20), 15.0), Angle::ZERO);
    }

    #[test]
    fn mirrored_image_negates_estimate() {
        let img = text_block(320, 160, 4.0);
        let zone = Rect::new(0, 0, 320, 160);
        let a = estimate_skew(&img, &zone, 15.0).degrees;
        let b = estimate_skew(&img.flipped_vertical(), &zone, 15.0).degrees;
        let quantum = (1.0 / 511.0f64).atan().to_degrees();
        assert!((a + b).abs() <= quantum + 1e-9, "{a} vs {b}");
    }

    #[test]
    fn compensation_threshold() {
        let r = Rect::new(100, 50, 200, 60);
        assert_eq!(compensate(&r, Angle::from_degrees(0.5), 1.5, 1000, 500), Quad::from_rect(&r));
        assert_eq!(compensate(&r, Angle::from_degrees(1.5), 1.5, 1000, 500), Quad::from_rect(&r));
        let q = compensate(&r, Angle::from_degrees(5.0), 1.5, 1000, 500);
        assert_ne!(q, Quad::from_rect(&r));
        // Top edge rises to the right for a positive angle.
        assert!(q.tr().y < q.tl().y);
        let slope = (q.tl().y - q.tr().y) / (q.tr().x - q.tl().x);
        assert!((slope.atan().to_degrees() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn compensation_stays_inside_image() {
        let r = Rect::new(0, 0, 200, 60);
        let q = compensate(&r, Angle::from_degrees(8.0), 1.5, 200, 60);
        let (x0, y0, x1, y1) = q.bounds();
        assert!(x0 >= -1e-9 && y0 >= -1e-9 && x1 <= 200.0 + 1e-9 && y1 <= 60.0 + 1e-9);
        assert!(q.is_simple());
    }

    #[test]
    fn oriented_bounds_of_rotated_rect() {
        let center = Point::new(100.0, 100.0);
        let pts: Vec<Point> = (0..40)
            .flat_map(|x| (0..10).map(move |y| Point::new(80.0 + x as f64 + 0.5, 95.0 + y as f64 + 0.5)))
            .map(|p| p.rotated_about(center, 6f64.to_radians()))
            .collect();
        let q = oriented_bounds(pts, Angle::from_degrees(6.0)).unwrap();
        assert!((q.top_width() - 40.0).abs() < 1e-6);
        assert!((q.left_height() - 10.0).abs() < 1e-6);
    }
}

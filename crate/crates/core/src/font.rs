//! Embedded monospaced stroke font.
//!
//! Glyphs are center-line polylines in a unit box (x right, y down) that are
//! stroked with a round pen and antialiased by distance. The same outlines
//! feed the recognizer's template atlas and the synthetic tag renderer.

use crate::imgcore::{ColorImage, Rect};

pub const FONT_NAME: &str = "pricetag-stroke-mono";

type Polyline = Vec<(f64, f64)>;

/// Elliptical arc, angles in degrees, counter-clockwise on screen.
fn arc(cx: f64, cy: f64, rx: f64, ry: f64, from: f64, to: f64) -> Polyline {
    let steps = (((to - from).abs() / 10.0).ceil() as usize).max(2);
    (0..=steps)
        .map(|i| {
            let t = (from + (to - from) * i as f64 / steps as f64).to_radians();
            (cx + rx * t.cos(), cy - ry * t.sin())
        })
        .collect()
}

fn join(mut a: Polyline, b: Polyline) -> Polyline {
    a.extend(b);
    a
}

fn line(points: &[(f64, f64)]) -> Polyline {
    points.to_vec()
}

/// Center-line strokes of `ch`, or `None` when the font has no such glyph.
/// The dot is handled separately as a filled disk.
pub fn glyph_strokes(ch: char) -> Option<Vec<Polyline>> {
    let g = match ch {
        '0' => vec![arc(0.5, 0.5, 0.5, 0.5, 0.0, 360.0)],
        '1' => vec![line(&[(0.18, 0.24), (0.58, 0.0), (0.58, 1.0)]), line(&[(0.2, 1.0), (0.95, 1.0)])],
        '2' => vec![join(arc(0.5, 0.28, 0.5, 0.28, 165.0, -35.0), line(&[(0.0, 1.0), (1.0, 1.0)]))],
        '3' => vec![arc(0.5, 0.25, 0.46, 0.25, 160.0, -90.0), arc(0.5, 0.75, 0.5, 0.25, 90.0, -165.0)],
        '4' => vec![line(&[(0.74, 1.0), (0.74, 0.0), (0.0, 0.68), (1.0, 0.68)])],
        '5' => vec![join(line(&[(0.92, 0.0), (0.12, 0.0), (0.07, 0.46)]), arc(0.5, 0.69, 0.5, 0.31, 138.0, -155.0))],
        '6' => vec![
            join(arc(0.62, 0.62, 0.62, 0.62, 72.0, 180.0), line(&[(0.0, 0.7)])),
            arc(0.5, 0.7, 0.5, 0.3, 0.0, 360.0),
        ],
        '7' => vec![line(&[(0.0, 0.0), (1.0, 0.0), (0.34, 1.0)])],
        '8' => vec![arc(0.5, 0.25, 0.42, 0.25, 0.0, 360.0), arc(0.5, 0.73, 0.5, 0.27, 0.0, 360.0)],
        '9' => {
            glyph_strokes('6')?.into_iter().map(|p| p.into_iter().map(|(x, y)| (1.0 - x, 1.0 - y)).collect()).collect()
        }
        'A' => vec![line(&[(0.0, 1.0), (0.5, 0.0), (1.0, 1.0)]), line(&[(0.22, 0.6), (0.78, 0.6)])],
        'C' => vec![arc(0.55, 0.5, 0.45, 0.5, 45.0, 315.0)],
        'E' => vec![line(&[(1.0, 0.0), (0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]), line(&[(0.0, 0.5), (0.8, 0.5)])],
        'H' => vec![line(&[(0.0, 0.0), (0.0, 1.0)]), line(&[(1.0, 0.0), (1.0, 1.0)]), line(&[(0.0, 0.5), (1.0, 0.5)])],
        'I' => vec![line(&[(0.5, 0.0), (0.5, 1.0)])],
        'K' => vec![line(&[(0.0, 0.0), (0.0, 1.0)]), line(&[(1.0, 0.0), (0.0, 0.6)]), line(&[(0.3, 0.4), (1.0, 1.0)])],
        'L' => vec![line(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)])],
        'M' => vec![line(&[(0.0, 1.0), (0.0, 0.0), (0.5, 0.6), (1.0, 0.0), (1.0, 1.0)])],
        'N' => vec![line(&[(0.0, 1.0), (0.0, 0.0), (1.0, 1.0), (1.0, 0.0)])],
        'O' => vec![arc(0.5, 0.5, 0.5, 0.5, 0.0, 360.0)],
        'P' => vec![
            join(line(&[(0.0, 1.0), (0.0, 0.0), (0.55, 0.0)]), arc(0.55, 0.27, 0.45, 0.27, 90.0, -90.0)),
            line(&[(0.55, 0.54), (0.0, 0.54)]),
        ],
        'R' => vec![
            join(line(&[(0.0, 1.0), (0.0, 0.0), (0.55, 0.0)]), arc(0.55, 0.27, 0.45, 0.27, 90.0, -90.0)),
            line(&[(0.55, 0.54), (0.0, 0.54)]),
            line(&[(0.45, 0.54), (1.0, 1.0)]),
        ],
        'T' => vec![line(&[(0.0, 0.0), (1.0, 0.0)]), line(&[(0.5, 0.0), (0.5, 1.0)])],
        'U' => vec![join(
            line(&[(0.0, 0.0), (0.0, 0.6)]),
            join(arc(0.5, 0.6, 0.5, 0.4, 180.0, 360.0), line(&[(1.0, 0.0)])),
        )],
        'V' => vec![line(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)])],
        'X' => vec![line(&[(0.0, 0.0), (1.0, 1.0)]), line(&[(1.0, 0.0), (0.0, 1.0)])],
        'Y' => vec![line(&[(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)]), line(&[(0.5, 0.5), (0.5, 1.0)])],
        _ => return None,
    };
    Some(g)
}

/// Glyph proportions relative to the cap height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlyphStyle {
    pub height: f64,
    pub width_ratio: f64,
    pub stroke_ratio: f64,
    pub gap_ratio: f64,
    pub dot_ratio: f64,
}

impl GlyphStyle {
    pub fn new(height: f64) -> Self {
        Self { height, width_ratio: 0.6, stroke_ratio: 0.13, gap_ratio: 0.1, dot_ratio: 0.2 }
    }

    pub fn glyph_width(&self, ch: char) -> f64 {
        if ch == '.' {
            self.dot_ratio * self.height
        } else {
            self.width_ratio * self.height
        }
    }

    pub fn gap(&self) -> f64 {
        self.gap_ratio * self.height
    }

    /// Total advance of a string: glyph boxes separated by one gap.
    pub fn text_width(&self, text: &str) -> f64 {
        let n = text.chars().count();
        let boxes: f64 = text.chars().map(|c| self.glyph_width(c)).sum();
        boxes + self.gap() * n.saturating_sub(1) as f64
    }
}

/// Antialiased ink coverage of one glyph on a pixel grid.
#[derive(Debug, Clone)]
pub struct Coverage {
    /// Pixel position of `values[0]` in the target image (may be negative).
    pub x0: i64,
    pub y0: i64,
    pub width: usize,
    pub height: usize,
    pub values: Vec<f32>,
}

impl Coverage {
    /// Bounding pixel rect of values at or above `level`, in target coordinates.
    pub fn ink_bounds(&self, level: f32) -> Option<(i64, i64, i64, i64)> {
        let mut b: Option<(i64, i64, i64, i64)> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.values[y * self.width + x] >= level {
                    let (px, py) = (self.x0 + x as i64, self.y0 + y as i64);
                    b = Some(match b {
                        None => (px, py, px, py),
                        Some((a, c, d, e)) => (a.min(px), c.min(py), d.max(px), e.max(py)),
                    });
                }
            }
        }
        b
    }
}

fn segment_distance(px: f64, py: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((px - a.0) * dx + (py - a.1) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (qx, qy) = (a.0 + t * dx - px, a.1 + t * dy - py);
    (qx * qx + qy * qy).sqrt()
}

type Segment = ((f64, f64), (f64, f64));

/// Rasterizes `ch` with its box's top-left corner at `(left, top)` in
/// continuous pixel coordinates. `None` for characters outside the font.
pub fn rasterize(ch: char, style: &GlyphStyle, left: f64, top: f64) -> Option<Coverage> {
    let h = style.height;
    let w = style.glyph_width(ch);
    // (segment endpoints in pixels, pen radius)
    let (segments, radius): (Vec<Segment>, f64) = if ch == '.' {
        let r = w / 2.0;
        let c = (left + r, top + h - r);
        (vec![(c, c)], r)
    } else {
        let sw = (style.stroke_ratio * h).max(1.0);
        let map = |(gx, gy): (f64, f64)| (left + sw / 2.0 + gx * (w - sw), top + sw / 2.0 + gy * (h - sw));
        let segs = glyph_strokes(ch)?
            .into_iter()
            .flat_map(|poly| {
                let pts: Vec<_> = poly.into_iter().map(map).collect();
                pts.windows(2).map(|p| (p[0], p[1])).collect::<Vec<_>>()
            })
            .collect();
        (segs, sw / 2.0)
    };

    let x0 = (left - 1.0).floor() as i64;
    let y0 = (top - 1.0).floor() as i64;
    let width = (w + 3.0).ceil() as usize;
    let height = (h + 3.0).ceil() as usize;
    let mut dist = vec![f64::INFINITY; width * height];
    for &(a, b) in &segments {
        let reach = radius + 1.0;
        let bx0 = ((a.0.min(b.0) - reach).floor() as i64 - x0).max(0) as usize;
        let by0 = ((a.1.min(b.1) - reach).floor() as i64 - y0).max(0) as usize;
        let bx1 = (((a.0.max(b.0) + reach).ceil() as i64 - x0).max(0) as usize).min(width);
        let by1 = (((a.1.max(b.1) + reach).ceil() as i64 - y0).max(0) as usize).min(height);
        for y in by0..by1 {
            let py = (y0 + y as i64) as f64 + 0.5;
            for x in bx0..bx1 {
                let px = (x0 + x as i64) as f64 + 0.5;
                let d = segment_distance(px, py, a, b);
                let slot = &mut dist[y * width + x];
                if d < *slot {
                    *slot = d;
                }
            }
        }
    }
    let values = dist.into_iter().map(|d| (radius - d + 0.5).clamp(0.0, 1.0) as f32).collect();
    Some(Coverage { x0, y0, width, height, values })
}

/// Alpha-blends `cov` in `color` onto `img`, clipping at the image edge.
pub fn blend(img: &mut ColorImage, cov: &Coverage, color: [u8; 3]) {
    let (iw, ih) = (img.width() as i64, img.height() as i64);
    for y in 0..cov.height {
        let py = cov.y0 + y as i64;
        if py < 0 || py >= ih {
            continue;
        }
        for x in 0..cov.width {
            let px = cov.x0 + x as i64;
            let a = cov.values[y * cov.width + x];
            if px < 0 || px >= iw || a <= 0.0 {
                continue;
            }
            let old = img.get(px as usize, py as usize);
            let mut new = [0u8; 3];
            for c in 0..3 {
                new[c] = (old[c] as f32 * (1.0 - a) + color[c] as f32 * a).round() as u8;
            }
            img.set(px as usize, py as usize, new);
        }
    }
}

/// Draws `text` with its first box's top-left at `(left, top)`. Returns the
/// pixel rect of coverage >= 0.5 (clipped to the image), if any ink landed.
pub fn draw_text(
    img: &mut ColorImage,
    text: &str,
    style: &GlyphStyle,
    left: f64,
    top: f64,
    color: [u8; 3],
) -> Option<Rect> {
    let mut x = left;
    let mut bounds: Option<(i64, i64, i64, i64)> = None;
    for ch in text.chars() {
        if ch != ' ' {
            if let Some(cov) = rasterize(ch, style, x, top) {
                blend(img, &cov, color);
                if let Some(b) = cov.ink_bounds(0.5) {
                    bounds = Some(match bounds {
                        None => b,
                        Some(a) => (a.0.min(b.0), a.1.min(b.1), a.2.max(b.2), a.3.max(b.3)),
                    });
                }
            }
        }
        x += style.glyph_width(ch) + style.gap();
    }
    let (x0, y0, x1, y1) = bounds?;
    let (w, h) = (img.width() as i64, img.height() as i64);
    let (x0, y0, x1, y1) = (x0.max(0), y0.max(0), x1.min(w - 1), y1.min(h - 1));
    (x1 >= x0 && y1 >= y0).then(|| Rect::from_inclusive(x0 as usize, y0 as usize, x1 as usize, y1 as usize))
}

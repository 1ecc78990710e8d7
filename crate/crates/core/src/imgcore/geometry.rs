//! Pixel rectangles and sub-pixel quadrangles.
//!
//! Continuous coordinates put pixel `(i, j)` on the unit square
//! `[i, i+1) x [j, j+1)`, so its center sits at `(i + 0.5, j + 0.5)`. A `Rect`
//! converts to a `Quad` along its outer pixel edges.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Rotates around `center` by `radians`, counter-clockwise as seen on screen
    /// (y grows downwards).
    pub fn rotated_about(self, center: Point, radians: f64) -> Point {
        let (s, c) = radians.sin_cos();
        let dx = self.x - center.x;
        let dy = self.y - center.y;
        Point::new(center.x + dx * c + dy * s, center.y - dx * s + dy * c)
    }
}

/// Axis-aligned pixel rectangle; `x`/`y` is the inclusive top-left pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    /// Smallest rect covering the inclusive pixel span `[x0, x1] x [y0, y1]`.
    pub fn from_inclusive(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Self { x: x0, y: y0, w: x1 - x0 + 1, h: y1 - y0 + 1 }
    }

    /// Exclusive right edge.
    pub fn right(&self) -> usize {
        self.x + self.w
    }

    /// Exclusive bottom edge.
    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn center(&self) -> Point {
        Point::new(self.x as f64 + self.w as f64 / 2.0, self.y as f64 + self.h as f64 / 2.0)
    }

    pub fn fits_within(&self, width: usize, height: usize) -> bool {
        self.w >= 1 && self.h >= 1 && self.right() <= width && self.bottom() <= height
    }

    pub fn union(&self, other: &Rect) -> Rect {
        let x0 = self.x.min(other.x);
        let y0 = self.y.min(other.y);
        let x1 = self.right().max(other.right());
        let y1 = self.bottom().max(other.bottom());
        Rect::new(x0, y0, x1 - x0, y1 - y0)
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        (x1 > x0 && y1 > y0).then(|| Rect::new(x0, y0, x1 - x0, y1 - y0))
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x >= self.x && other.y >= self.y && other.right() <= self.right() && other.bottom() <= self.bottom()
    }

    pub fn translated(&self, dx: isize, dy: isize) -> Rect {
        Rect::new((self.x as isize + dx) as usize, (self.y as isize + dy) as usize, self.w, self.h)
    }

    /// Length of the shared vertical extent.
    pub fn vertical_overlap(&self, other: &Rect) -> usize {
        self.bottom().min(other.bottom()).saturating_sub(self.y.max(other.y))
    }

    /// Length of the shared horizontal extent.
    pub fn horizontal_overlap(&self, other: &Rect) -> usize {
        self.right().min(other.right()).saturating_sub(self.x.max(other.x))
    }
}

/// Four corners in order top-left, top-right, bottom-right, bottom-left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub corners: [Point; 4],
}

impl Quad {
    pub const fn new(corners: [Point; 4]) -> Self {
        Self { corners }
    }

    pub fn from_rect(r: &Rect) -> Quad {
        let (x0, y0) = (r.x as f64, r.y as f64);
        let (x1, y1) = (r.right() as f64, r.bottom() as f64);
        Quad::new([Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)])
    }

    pub fn tl(&self) -> Point {
        self.corners[0]
    }

    pub fn tr(&self) -> Point {
        self.corners[1]
    }

    pub fn br(&self) -> Point {
        self.corners[2]
    }

    pub fn bl(&self) -> Point {
        self.corners[3]
    }

    /// Shoelace area; positive for clockwise-on-screen (TL, TR, BR, BL) order.
    pub fn signed_area(&self) -> f64 {
        polygon_signed_area(&self.corners)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn centroid(&self) -> Point {
        let sx: f64 = self.corners.iter().map(|p| p.x).sum();
        let sy: f64 = self.corners.iter().map(|p| p.y).sum();
        Point::new(sx / 4.0, sy / 4.0)
    }

    /// True when no pair of non-adjacent edges crosses and the area is positive.
    pub fn is_simple(&self) -> bool {
        let c = &self.corners;
        self.area() > 1e-9 && !segments_cross(c[0], c[1], c[2], c[3]) && !segments_cross(c[1], c[2], c[3], c[0])
    }

    pub fn rotated_about(&self, center: Point, radians: f64) -> Quad {
        Quad::new(self.corners.map(|p| p.rotated_about(center, radians)))
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Quad {
        Quad::new(self.corners.map(|p| Point::new(p.x + dx, p.y + dy)))
    }

    /// (min_x, min_y, max_x, max_y) of the corners.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.corners
            .iter()
            .fold((f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY), |(ax, ay, bx, by), p| {
                (ax.min(p.x), ay.min(p.y), bx.max(p.x), by.max(p.y))
            })
    }

    pub fn top_width(&self) -> f64 {
        dist(self.tl(), self.tr())
    }

    pub fn left_height(&self) -> f64 {
        dist(self.tl(), self.bl())
    }

    /// Intersection over union, exact for convex quads.
    pub fn iou(&self, other: &Quad) -> f64 {
        let a = self.area();
        let b = other.area();
        if a <= 0.0 || b <= 0.0 {
            return 0.0;
        }
        let inter = convex_intersection_area(&self.corners, &other.corners);
        let union = a + b - inter;
        if union <= 0.0 {
            0.0
        } else {
            (inter / union).clamp(0.0, 1.0)
        }
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

fn polygon_signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    acc / 2.0
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn oriented_ccw_math(pts: &[Point]) -> Vec<Point> {
    // Sutherland-Hodgman below expects positive shoelace orientation.
    let mut v = pts.to_vec();
    if polygon_signed_area(&v) < 0.0 {
        v.reverse();
    }
    v
}

fn convex_intersection_area(a: &[Point], b: &[Point]) -> f64 {
    let subject = oriented_ccw_math(a);
    let clip = oriented_ccw_math(b);
    let mut output = subject;
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let c0 = clip[i];
        let c1 = clip[(i + 1) % clip.len()];
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let cur_in = cross(c0, c1, cur) >= 0.0;
            let prev_in = cross(c0, c1, prev) >= 0.0;
            if cur_in {
                if !prev_in {
                    output.push(line_intersection(prev, cur, c0, c1));
                }
                output.push(cur);
            } else if prev_in {
                output.push(line_intersection(prev, cur, c0, c1));
            }
        }
    }
    if output.len() < 3 {
        0.0
    } else {
        polygon_signed_area(&output).abs()
    }
}

fn line_intersection(p: Point, q: Point, a: Point, b: Point) -> Point {
    let r = Point::new(q.x - p.x, q.y - p.y);
    let s = Point::new(b.x - a.x, b.y - a.y);
    let denom = r.x * s.y - r.y * s.x;
    if denom.abs() < 1e-15 {
        return q;
    }
    let t = ((a.x - p.x) * s.y - (a.y - p.y) * s.x) / denom;
    Point::new(p.x + t * r.x, p.y + t * r.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_set_ops() {
        let a = Rect::new(0, 0, 10, 10);
        let b = Rect::new(5, 5, 10, 10);
        assert_eq!(a.intersection(&b), Some(Rect::new(5, 5, 5, 5)));
        assert_eq!(a.union(&b), Rect::new(0, 0, 15, 15));
        assert_eq!(a.intersection(&Rect::new(10, 0, 2, 2)), None);
        assert_eq!(a.vertical_overlap(&b), 5);
    }

    #[test]
    fn quad_iou_of_rects() {
        let a = Quad::from_rect(&Rect::new(0, 0, 10, 10));
        let b = Quad::from_rect(&Rect::new(5, 0, 10, 10));
        assert!((a.iou(&b) - 50.0 / 150.0).abs() < 1e-12);
        assert!((a.iou(&a) - 1.0).abs() < 1e-12);
        let far = Quad::from_rect(&Rect::new(50, 50, 3, 3));
        assert_eq!(a.iou(&far), 0.0);
    }

    #[test]
    fn rotated_square_iou_matches_octagon_area() {
        // Unit square vs itself rotated 45 degrees: intersection is a regular
        // octagon of area 2*(sqrt(2)-1) for side-1 squares.
        let sq =
            Quad::new([Point::new(-0.5, -0.5), Point::new(0.5, -0.5), Point::new(0.5, 0.5), Point::new(-0.5, 0.5)]);
        let rot = sq.rotated_about(Point::new(0.0, 0.0), std::f64::consts::FRAC_PI_4);
        let inter = 2.0 * (2f64.sqrt() - 1.0);
        let expected = inter / (2.0 - inter);
        assert!((sq.iou(&rot) - expected).abs() < 1e-9);
    }

    #[test]
    fn simplicity() {
        let q = Quad::from_rect(&Rect::new(1, 1, 4, 3));
        assert!(q.is_simple());
        let bow = Quad::new([q.tl(), q.br(), q.tr(), q.bl()]);
        assert!(!bow.is_simple());
        let flat = Quad::new([Point::new(0.0, 0.0); 4]);
        assert!(!flat.is_simple());
    }

    #[test]
    fn counter_clockwise_rotation_on_screen() {
        // Rotating the point right of center by +90 degrees moves it up (smaller y).
        let p = Point::new(1.0, 0.0).rotated_about(Point::new(0.0, 0.0), std::f64::consts::FRAC_PI_2);
        assert!(p.x.abs() < 1e-12 && (p.y + 1.0).abs() < 1e-12);
    }
}

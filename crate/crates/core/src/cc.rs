//! 8-connected component labeling.
//!
//! Run-based two-pass scheme: runs get provisional labels joined by
//! union-find on the first scan, resolution on the second. Final ids follow
//! the row-major position of each component's first pixel.

use serde::{Deserialize, Serialize};

use crate::imgcore::{BinaryImage, Point, Rect};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub id: u32,
    pub bbox: Rect,
    pub pixel_count: usize,
    /// Mean of pixel centers, in continuous image coordinates.
    pub centroid: Point,
}

impl Component {
    pub fn aspect(&self) -> f64 {
        self.bbox.w as f64 / self.bbox.h as f64
    }

    pub fn fill_ratio(&self) -> f64 {
        self.pixel_count as f64 / self.bbox.area() as f64
    }
}

/// Label raster plus per-component statistics. Label 0 is background;
/// component `i` in `components` carries label `i + 1`.
#[derive(Debug, Clone)]
pub struct Labeling {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub components: Vec<Component>,
}

impl Labeling {
    pub fn label_at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Mask of the given component ids restricted to `r`.
    pub fn mask(&self, r: &Rect, ids: &[u32]) -> BinaryImage {
        BinaryImage::from_fn(r.w, r.h, |x, y| {
            let l = self.label_at(r.x + x, r.y + y);
            l != 0 && ids.contains(&(l - 1))
        })
        .expect("rect is nonempty")
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        // Slot 0 is the background label.
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

struct Accum {
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
    count: usize,
    sx: u64,
    sy: u64,
}

/// Horizontal run `[x0, x1)` on row `y` with its provisional label.
struct Run {
    y: usize,
    x0: usize,
    x1: usize,
    label: u32,
}

pub fn label(img: &BinaryImage) -> Labeling {
    let (w, h) = (img.width(), img.height());
    let px = img.pixels();
    let mut uf = UnionFind::new();
    let mut runs: Vec<Run> = Vec::new();
    let mut prev = 0..0;

    for y in 0..h {
        let row = &px[y * w..(y + 1) * w];
        let start = runs.len();
        let mut p = prev.start;
        let mut x = 0;
        while x < w {
            if !row[x] {
                x += 1;
                continue;
            }
            let x0 = x;
            while x < w && row[x] {
                x += 1;
            }
            // Runs on the previous row touching [x0 - 1, x] are 8-adjacent.
            while p < prev.end && runs[p].x1 < x0 {
                p += 1;
            }
            let mut cur = 0u32;
            let mut q = p;
            while q < prev.end && runs[q].x0 <= x {
                let l = runs[q].label;
                cur = if cur == 0 { l } else { uf.union(cur, l) };
                q += 1;
            }
            if cur == 0 {
                cur = uf.make();
            }
            runs.push(Run { y, x0, x1: x, label: cur });
        }
        prev = start..runs.len();
    }

    let roots: Vec<u32> = (0..uf.parent.len() as u32).map(|l| uf.find(l)).collect();
    let mut final_id = vec![u32::MAX; uf.parent.len()];
    let mut acc: Vec<Accum> = Vec::new();
    let mut labels = vec![0u32; w * h];
    for r in &runs {
        let root = roots[r.label as usize] as usize;
        if final_id[root] == u32::MAX {
            final_id[root] = acc.len() as u32;
            acc.push(Accum { x0: r.x0, y0: r.y, x1: r.x1 - 1, y1: r.y, count: 0, sx: 0, sy: 0 });
        }
        let id = final_id[root];
        labels[r.y * w + r.x0..r.y * w + r.x1].fill(id + 1);
        let len = r.x1 - r.x0;
        let a = &mut acc[id as usize];
        a.x0 = a.x0.min(r.x0);
        a.x1 = a.x1.max(r.x1 - 1);
        a.y1 = r.y;
        a.count += len;
        a.sx += ((r.x0 + r.x1 - 1) * len / 2) as u64;
        a.sy += (r.y * len) as u64;
    }

    let components = acc
        .into_iter()
        .enumerate()
        .map(|(id, a)| Component {
            id: id as u32,
            bbox: Rect::from_inclusive(a.x0, a.y0, a.x1, a.y1),
            pixel_count: a.count,
            centroid: Point::new(a.sx as f64 / a.count as f64 + 0.5, a.sy as f64 / a.count as f64 + 0.5),
        })
        .collect();
    Labeling { width: w, height: h, labels, components }
}

pub fn label_components(img: &BinaryImage) -> Vec<Component> {
    label(img).components
}

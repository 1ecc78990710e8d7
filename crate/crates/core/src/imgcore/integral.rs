//! Summed-area tables for O(1) window mean and standard deviation.

use crate::imgcore::geometry::Rect;
use crate::imgcore::raster::GrayImage;

/// `(width+1) x (height+1)` cumulative sums of intensities and squared
/// intensities. Row 0 and column 0 are zero.
#[derive(Debug, Clone)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    sums: Vec<u64>,
    squares: Vec<u64>,
}

impl IntegralImage {
    pub fn new(img: &GrayImage) -> Self {
        let mut ii = Self { width: 0, height: 0, sums: Vec::new(), squares: Vec::new() };
        ii.rebuild(img);
        ii
    }

    /// Recomputes the tables for `img`, reusing the existing allocations.
    pub fn rebuild(&mut self, img: &GrayImage) {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let len = stride * (h + 1);
        self.width = w;
        self.height = h;
        self.sums.resize(len, 0);
        self.squares.resize(len, 0);
        self.sums[..stride].fill(0);
        self.squares[..stride].fill(0);
        let src = img.pixels();
        for y in 0..h {
            let row = &src[y * w..(y + 1) * w];
            let (above_s, here_s) = self.sums[y * stride..(y + 2) * stride].split_at_mut(stride);
            let (above_q, here_q) = self.squares[y * stride..(y + 2) * stride].split_at_mut(stride);
            here_s[0] = 0;
            here_q[0] = 0;
            let (mut row_sum, mut row_sq) = (0u64, 0u64);
            for (x, &v) in row.iter().enumerate() {
                let v = v as u64;
                row_sum += v;
                row_sq += v * v;
                here_s[x + 1] = above_s[x + 1] + row_sum;
                here_q[x + 1] = above_q[x + 1] + row_sq;
            }
        }
    }

    /// Width of the source image.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Height of the source image.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Table entry: sum over pixels `[0, x) x [0, y)`.
    pub fn sum_at(&self, x: usize, y: usize) -> u64 {
        self.sums[y * (self.width + 1) + x]
    }

    pub fn square_sum_at(&self, x: usize, y: usize) -> u64 {
        self.squares[y * (self.width + 1) + x]
    }

    /// Rows `y` of the sum and squared-sum tables, `width + 1` entries each.
    #[inline]
    pub fn table_rows(&self, y: usize) -> (&[u64], &[u64]) {
        let stride = self.width + 1;
        (&self.sums[y * stride..(y + 1) * stride], &self.squares[y * stride..(y + 1) * stride])
    }

    /// Window sum and squared sum over the pixels `[x0, x1) x [y0, y1)`.
    #[inline]
    pub fn span_sums(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> (u64, u64) {
        let stride = self.width + 1;
        let a = y0 * stride + x0;
        let b = y0 * stride + x1;
        let c = y1 * stride + x0;
        let d = y1 * stride + x1;
        (
            self.sums[d] + self.sums[a] - self.sums[b] - self.sums[c],
            self.squares[d] + self.squares[a] - self.squares[b] - self.squares[c],
        )
    }

    pub fn window_sums(&self, r: &Rect) -> (u64, u64) {
        debug_assert!(r.fits_within(self.width, self.height));
        self.span_sums(r.x, r.y, r.right(), r.bottom())
    }

    /// Population mean and standard deviation over `r`.
    pub fn window_stats(&self, r: &Rect) -> (f64, f64) {
        let (s, q) = self.window_sums(r);
        stats_from_sums(s, q, r.area() as u64)
    }
}

#[inline]
pub(crate) fn stats_from_sums(sum: u64, sq: u64, n: u64) -> (f64, f64) {
    let n = n as f64;
    let mean = sum as f64 / n;
    let var = (sq as f64 / n - mean * mean).max(0.0);
    (mean, var.sqrt())
}

pub fn build_integral(img: &GrayImage) -> IntegralImage {
    IntegralImage::new(img)
}

pub fn window_stats(ii: &IntegralImage, r: &Rect) -> (f64, f64) {
    ii.window_stats(r)
}

//! Fast Hough transform for near-horizontal lines.
//!
//! The image is zero-padded to a power-of-two width `n`. Cell `(y, s)` holds
//! the foreground count along the dyadic digital line from `(0, y)` to
//! `(n - 1, y + s)`. Merging two half-width blocks for a total shift `s`
//! takes the left half at shift `s / 2` and the right half at shift `s / 2`
//! started `ceil(s / 2)` rows lower, giving `O(n * rows * log n)` work.

use crate::imgcore::BinaryImage;

/// Line-sum table for downward (non-negative) shears.
#[derive(Debug, Clone)]
pub struct FhtAccumulator {
    width: usize,
    height: usize,
    pad: usize,
    shifts: usize,
    /// `[shift][row]`, row `r` is intercept `r - pad`.
    data: Vec<u32>,
}

impl FhtAccumulator {
    /// Padded (power-of-two) width.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn image_height(&self) -> usize {
        self.height
    }

    /// Number of shears computed, `0..shifts`.
    pub fn shifts(&self) -> usize {
        self.shifts
    }

    /// Smallest intercept stored; lines starting higher never touch the image.
    pub fn min_intercept(&self) -> isize {
        -(self.pad as isize)
    }

    pub fn rows(&self) -> usize {
        self.height + self.pad
    }

    pub fn get(&self, intercept: isize, shift: usize) -> u32 {
        let r = intercept + self.pad as isize;
        if shift >= self.shifts || r < 0 || r as usize >= self.rows() {
            return 0;
        }
        self.data[shift * self.rows() + r as usize]
    }

    /// All intercept values for one shear.
    pub fn column(&self, shift: usize) -> &[u32] {
        let rows = self.rows();
        &self.data[shift * rows..(shift + 1) * rows]
    }
}

pub fn padded_width(w: usize) -> usize {
    w.next_power_of_two()
}

/// Row offset of the dyadic pattern with total shift `s` over width `n` at
/// column `x`.
pub fn dyadic_offset(s: usize, n: usize, x: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    let half = n / 2;
    if x < half {
        dyadic_offset(s >> 1, half, x)
    } else {
        ((s + 1) >> 1) + dyadic_offset(s >> 1, half, x - half)
    }
}

/// Maximum row deviation of a dyadic pattern of width `n` from the ideal
/// straight line, `ceil(log2(n) / 6)`.
pub fn dyadic_deviation_bound(n: usize) -> usize {
    let k = n.max(1).trailing_zeros() as usize;
    k.div_ceil(6).max(1)
}

/// Full transform: every shear `0..n`.
pub fn fht_horizontal(img: &BinaryImage) -> FhtAccumulator {
    let n = padded_width(img.width());
    fht_horizontal_limited(img, n - 1)
}

/// Transform restricted to shears `0..=max_shift`.
pub fn fht_horizontal_limited(img: &BinaryImage, max_shift: usize) -> FhtAccumulator {
    let n = padded_width(img.width());
    let levels = n.trailing_zeros() as usize;
    let max_shift = max_shift.min(n - 1);
    let pad = max_shift;
    let h = img.height();
    let rows = h + pad;

    // Level 0: one block per column, a single shear.
    let mut cur = vec![0u32; n * rows];
    for y in 0..h {
        for x in 0..img.width() {
            if img.get(x, y) {
                cur[x * rows + y + pad] = 1;
            }
        }
    }
    let mut cur_shifts = 1usize;
    let mut next = Vec::new();

    for level in 1..=levels {
        let m = 1usize << level;
        let blocks = n / m;
        let shifts = m.min((max_shift >> (levels - level)) + 1);
        next.clear();
        next.resize(blocks * shifts * rows, 0);
        let prev_block = cur_shifts * rows;
        for b in 0..blocks {
            let left = &cur[(2 * b) * prev_block..(2 * b + 1) * prev_block];
            let right = &cur[(2 * b + 1) * prev_block..(2 * b + 2) * prev_block];
            let out = &mut next[b * shifts * rows..(b + 1) * shifts * rows];
            for s in 0..shifts {
                let half = s >> 1;
                let lift = (s + 1) >> 1;
                let l = &left[half * rows..(half + 1) * rows];
                let r = &right[half * rows..(half + 1) * rows];
                let o = &mut out[s * rows..(s + 1) * rows];
                let split = rows.saturating_sub(lift);
                for i in 0..split {
                    o[i] = l[i] + r[i + lift];
                }
                o[split..].copy_from_slice(&l[split..]);
            }
        }
        std::mem::swap(&mut cur, &mut next);
        cur_shifts = shifts;
    }

    FhtAccumulator { width: n, height: h, pad, shifts: cur_shifts, data: cur }
}

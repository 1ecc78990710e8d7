//! Price zone search: size filtration, format-aware clustering of digit
//! candidates and best-cluster selection across the two binarization
//! branches.

mod cluster;
mod filter;
mod model;
mod score;

pub use cluster::{cluster_by_format, extend_for_missing_digits, Branch, Cluster};
pub use filter::{derive_size_filter, is_dot_candidate, size_filter, SizeFilterParams};
pub use model::{NormRect, ScoreWeights, Span, TagModel, TagType};
pub use score::{argmax_cluster, score_cluster, select_best, ScoreTerms};

#[cfg(test)]
pub(crate) mod testutil {
    use crate::cc::Component;
    use crate::imgcore::Rect;

    /// Synthetic component with a given fill ratio.
    pub fn comp(id: u32, x: usize, y: usize, w: usize, h: usize, fill: f64) -> Component {
        let r = Rect::new(x, y, w, h);
        Component { id, bbox: r, pixel_count: ((w * h) as f64 * fill).round() as usize, centroid: r.center() }
    }
}

use serde::{Deserialize, Serialize};

use super::model::{Span, TagModel};
use crate::cc::Component;

/// Pixel-space limits for digit candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeFilterParams {
    pub h_range: Span,
    pub w_range: Span,
    pub area_range: Span,
    pub aspect_range: Span,
    /// Height range for dot candidates, which skip the digit limits.
    pub dot_h_range: Span,
    pub dot_aspect_range: Span,
    pub dot_min_fill: f64,
}

const MIN_DIGIT_PX: f64 = 4.0;
const MIN_DOT_PX: f64 = 2.0;
const MIN_FILL: f64 = 0.15;

pub fn derive_size_filter(model: &TagModel, _img_w: usize, img_h: usize) -> SizeFilterParams {
    let s = model.size_slack;
    let h = img_h as f64;
    let h_lo = (model.digit_h_frac.min * h * (1.0 - s)).max(MIN_DIGIT_PX);
    let h_hi = (model.digit_h_frac.max * h * (1.0 + s)).max(h_lo);
    let w_lo = (h_lo * model.digit_aspect.min).max(1.0);
    let w_hi = (h_hi * model.digit_aspect.max).max(w_lo);
    SizeFilterParams {
        h_range: Span::new(h_lo, h_hi),
        w_range: Span::new(w_lo, w_hi),
        area_range: Span::new(MIN_FILL * w_lo * h_lo, w_hi * h_hi),
        aspect_range: Span::new(model.digit_aspect.min * (1.0 - s), model.digit_aspect.max * (1.0 + s)),
        dot_h_range: Span::new((0.25 * h_lo).max(MIN_DOT_PX), (model.dot_height_max * h_hi).max(MIN_DOT_PX)),
        dot_aspect_range: Span::new(0.5, 2.0),
        dot_min_fill: 0.45,
    }
}

/// Small, compact, roughly round blob.
pub fn is_dot_candidate(c: &Component, p: &SizeFilterParams) -> bool {
    p.dot_h_range.contains(c.bbox.h as f64)
        && p.dot_aspect_range.contains(c.aspect())
        && c.fill_ratio() >= p.dot_min_fill
}

fn is_digit_candidate(c: &Component, p: &SizeFilterParams) -> bool {
    p.h_range.contains(c.bbox.h as f64)
        && p.w_range.contains(c.bbox.w as f64)
        && p.area_range.contains(c.pixel_count as f64)
        && p.aspect_range.contains(c.aspect())
}

pub fn size_filter(comps: &[Component], p: &SizeFilterParams) -> Vec<Component> {
    comps.iter().filter(|c| is_digit_candidate(c, p) || is_dot_candidate(c, p)).cloned().collect()
}

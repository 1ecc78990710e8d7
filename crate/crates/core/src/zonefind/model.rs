use serde::{Deserialize, Serialize};

use crate::binarize::DigitSizeEstimate;
use crate::error::{Error, Result};
use crate::imgcore::Rect;
use crate::price::{CountRange, PriceFormat};

/// Closed real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub min: f64,
    pub max: f64,
}

impl Span {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn center(&self) -> f64 {
        (self.min + self.max) / 2.0
    }

    pub fn scaled(&self, f: f64) -> Span {
        Span::new(self.min * f, self.max * f)
    }

    fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.min <= self.max
    }
}

/// Rectangle in normalized image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl NormRect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn to_pixels(&self, img_w: usize, img_h: usize) -> Rect {
        let (w, h) = (img_w as f64, img_h as f64);
        let x0 = (self.x0 * w).round() as usize;
        let y0 = (self.y0 * h).round() as usize;
        let x1 = ((self.x1 * w).round() as usize).max(x0);
        let y1 = ((self.y1 * h).round() as usize).max(y0);
        Rect::new(x0, y0, x1 - x0, y1 - y0)
    }
}

/// Exponents of the four score factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreWeights {
    pub format: f64,
    pub size: f64,
    pub layout: f64,
    pub count: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self { format: 1.0, size: 1.0, layout: 1.0, count: 1.0 }
    }
}

/// The five tag layouts with built-in profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TagType {
    /// Dotted price at the right, barcode at the bottom left.
    Shelf,
    /// Dotted price centered.
    Centered,
    /// Dotted price at the left, smaller unit price at the right.
    DualPrice,
    /// Integer price at the right, barcode at the bottom left.
    Integer,
    /// Colored promotional tag, dotted price at the right.
    Promo,
}

impl TagType {
    pub const ALL: [TagType; 5] =
        [TagType::Shelf, TagType::Centered, TagType::DualPrice, TagType::Integer, TagType::Promo];

    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|t| t == self).expect("listed")
    }
}

/// Geometric model of a price tag and the thresholds of the zone search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TagModel {
    /// Price digit height as a fraction of image height.
    pub digit_h_frac: Span,
    /// Digit width over height.
    pub digit_aspect: Span,
    pub price_zone_prior: NormRect,
    pub formats: Vec<PriceFormat>,
    pub max_gap_factor: f64,
    pub v_overlap_min: f64,
    pub height_ratio: Span,
    /// Dot height limit relative to the median member height.
    pub dot_height_max: f64,
    /// Allowed dot bottom offset from the members' bottom, relative to digit height.
    pub dot_baseline_tol: f64,
    /// Digit advance (width plus gap) relative to digit width.
    pub digit_advance: f64,
    /// Relative slack on the size filter ranges.
    pub size_slack: f64,
    pub tau_zone: f64,
    pub weights: ScoreWeights,
}

fn dotted(min: usize, max: usize) -> PriceFormat {
    PriceFormat { int_digits: CountRange::new(min, max), frac_digits: 2 }
}

fn integer(min: usize, max: usize) -> PriceFormat {
    PriceFormat { int_digits: CountRange::new(min, max), frac_digits: 0 }
}

impl Default for TagModel {
    fn default() -> Self {
        Self {
            digit_h_frac: Span::new(0.12, 0.28),
            digit_aspect: Span::new(0.4, 0.75),
            price_zone_prior: NormRect::new(0.0, 0.35, 1.0, 1.0),
            formats: vec![dotted(1, 4), integer(1, 5)],
            max_gap_factor: 1.5,
            v_overlap_min: 0.6,
            height_ratio: Span::new(0.6, 1.67),
            dot_height_max: 0.35,
            dot_baseline_tol: 0.25,
            digit_advance: 1.08,
            size_slack: 0.3,
            tau_zone: 0.5,
            weights: ScoreWeights::default(),
        }
    }
}

impl TagModel {
    /// Profile tuned to one tag layout.
    pub fn builtin(t: TagType) -> Self {
        let base = Self::default();
        let (prior, formats) = match t {
            TagType::Shelf => (NormRect::new(0.3, 0.4, 1.0, 1.0), vec![dotted(1, 4)]),
            TagType::Centered => (NormRect::new(0.1, 0.4, 0.9, 1.0), vec![dotted(1, 4)]),
            TagType::DualPrice => (NormRect::new(0.0, 0.4, 0.7, 1.0), vec![dotted(1, 4)]),
            TagType::Integer => (NormRect::new(0.3, 0.4, 1.0, 1.0), vec![integer(1, 5)]),
            TagType::Promo => (NormRect::new(0.2, 0.35, 1.0, 1.0), vec![dotted(1, 4), integer(1, 5)]),
        };
        Self { price_zone_prior: prior, formats, ..base }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("tag model: invalid {what}")));
        if !self.digit_h_frac.is_valid() || self.digit_h_frac.min <= 0.0 || self.digit_h_frac.max > 1.0 {
            return bad("digit_h_frac");
        }
        if !self.digit_aspect.is_valid() || self.digit_aspect.min <= 0.0 {
            return bad("digit_aspect");
        }
        let p = &self.price_zone_prior;
        if !(0.0 <= p.x0 && p.x0 < p.x1 && p.x1 <= 1.0 && 0.0 <= p.y0 && p.y0 < p.y1 && p.y1 <= 1.0) {
            return bad("price_zone_prior");
        }
        if self.formats.is_empty() {
            return bad("formats (empty)");
        }
        for f in &self.formats {
            f.validate()?;
        }
        if !self.height_ratio.is_valid() || self.height_ratio.min <= 0.0 {
            return bad("height_ratio");
        }
        let positive = [self.max_gap_factor, self.dot_height_max, self.dot_baseline_tol, self.digit_advance];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("gap/dot/advance factors");
        }
        if !(0.0..=1.0).contains(&self.v_overlap_min) || !(0.0..1.0).contains(&self.size_slack) {
            return bad("v_overlap_min or size_slack");
        }
        if !(0.0..=1.0).contains(&self.tau_zone) {
            return bad("tau_zone");
        }
        let w = &self.weights;
        if [w.format, w.size, w.layout, w.count].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("weights");
        }
        Ok(())
    }

    /// Digit size at the center of the model ranges.
    pub fn digit_estimate(&self, img_h: usize) -> DigitSizeEstimate {
        let h = (self.digit_h_frac.center() * img_h as f64).max(5.0);
        let w = (h * self.digit_aspect.center()).clamp(4.0, h - 0.5);
        DigitSizeEstimate { digit_h: h, digit_w: w }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_estimate_stays_valid_on_tiny_images() {
        let m = TagModel::default();
        for h in [1, 3, 16, 24, 700] {
            let e = m.digit_estimate(h);
            assert!(DigitSizeEstimate::new(e.digit_h, e.digit_w).is_ok(), "height {h}: {e:?}");
        }
    }

    #[test]
    fn defaults_and_profiles_validate() {
        TagModel::default().validate().unwrap();
        for t in TagType::ALL {
            TagModel::builtin(t).validate().unwrap();
        }
        let m = TagModel { price_zone_prior: NormRect::new(0.5, 0.0, 0.4, 1.0), ..Default::default() };
        assert!(m.validate().is_err());
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let json = serde_json::to_string(&TagModel::default()).unwrap();
        let back: TagModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, TagModel::default());
        assert!(serde_json::from_str::<TagModel>(r#"{"bogus": 1}"#).is_err());
        let partial: TagModel = serde_json::from_str(r#"{"tau_zone": 0.7}"#).unwrap();
        assert_eq!(partial.tau_zone, 0.7);
    }

    #[test]
    fn prior_to_pixels() {
        assert_eq!(NormRect::new(0.0, 0.5, 1.0, 1.0).to_pixels(1000, 500), Rect::new(0, 250, 1000, 250));
    }
}

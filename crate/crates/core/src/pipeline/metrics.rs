use serde::{Deserialize, Serialize};

use super::run::RecognitionResult;
use crate::imgcore::Quad;
use crate::price::Price;

/// Image-level outcome counts and the ratios derived from them, rounded to
/// three decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
}

impl Metrics {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// `num / den` rounded half-up to three decimals; 0 when `den` is 0.
pub fn ratio3(num: usize, den: usize) -> f64 {
    if den == 0 {
        return 0.0;
    }
    let (num, den) = (num as u128, den as u128);
    let milli = (2000 * num + den) / (2 * den);
    milli as f64 / 1000.0
}

pub fn compute_metrics(tp: usize, tn: usize, fp: usize, fn_: usize) -> Metrics {
    Metrics {
        tp,
        tn,
        fp,
        fn_,
        precision: ratio3(tp, tp + fp),
        recall: ratio3(tp, tp + fn_),
        accuracy: ratio3(tp + tn, tp + tn + fp + fn_),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Tp,
    Tn,
    Fp,
    Fn,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Tp => "tp",
            Outcome::Tn => "tn",
            Outcome::Fp => "fp",
            Outcome::Fn => "fn",
        }
    }
}

/// Ground truth for one image; `None` marks an image without a tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expected {
    pub price: Price,
    pub zone: Quad,
}

/// Outcome of one result. An accepted image without a tag is always FP;
/// with `check_value` a wrong price on the right zone is FP as well.
pub fn classify_outcome(
    result: &RecognitionResult,
    expected: Option<&Expected>,
    zone_iou: f64,
    check_value: bool,
) -> Outcome {
    match (expected, result.is_accepted()) {
        (None, false) => Outcome::Tn,
        (None, true) => Outcome::Fp,
        (Some(_), false) => Outcome::Fn,
        (Some(e), true) => {
            let zone_ok = result.zone.map(|z| z.iou(&e.zone) >= zone_iou).unwrap_or(false);
            let value_ok = !check_value || result.price == Some(e.price);
            if zone_ok && value_ok {
                Outcome::Tp
            } else {
                Outcome::Fp
            }
        }
    }
}

/// Tallies outcomes into metrics.
pub fn tally<'a>(outcomes: impl IntoIterator<Item = &'a Outcome>) -> Metrics {
    let mut c = [0usize; 4];
    for o in outcomes {
        c[*o as usize] += 1;
    }
    compute_metrics(c[0], c[1], c[2], c[3])
}

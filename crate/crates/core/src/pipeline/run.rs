use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use crate::binarize::{derive_window_scaled, niblack, NiblackParams};
use crate::cc::{label, Labeling};
use crate::deskew::{compensate, estimate_skew, fit_inside, oriented_bounds, Angle};
use crate::error::Result;
use crate::imgcore::warp::validate_quad;
use crate::imgcore::{scale_to_limit, to_gray, warp_quad_to_rect, BinaryImage, ColorImage, Point, Quad};
use crate::morph::{open, StructElem};
use crate::ocr::{postprocess, read_glyphs, segment_glyphs, OcrReject, Recognizer};
use crate::price::{Price, PriceFormat};
use crate::zonefind::{
    cluster_by_format, derive_size_filter, extend_for_missing_digits, select_best, size_filter, Branch, Cluster,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    NoCluster,
    LowScore,
    SkewEstimationEmpty,
    EmptyZone,
    FormatReject,
    LowConfidence,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::NoCluster => "no-cluster",
            RejectReason::LowScore => "low-score",
            RejectReason::SkewEstimationEmpty => "skew-estimation-empty",
            RejectReason::EmptyZone => "empty-zone",
            RejectReason::FormatReject => "format-reject",
            RejectReason::LowConfidence => "low-confidence",
        }
    }
}

/// Wall-clock microseconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTimings {
    pub scale_us: u64,
    pub gray_us: u64,
    pub binarize_us: u64,
    pub open_us: u64,
    pub label_us: u64,
    pub filter_us: u64,
    pub cluster_us: u64,
    pub select_us: u64,
    pub skew_us: u64,
    pub rectify_us: u64,
    pub ocr_us: u64,
    pub total_us: u64,
}

impl StageTimings {
    pub const STAGES: [&'static str; 11] =
        ["scale", "gray", "binarize", "open", "label", "filter", "cluster", "select", "skew", "rectify", "ocr"];

    pub fn stages(&self) -> [u64; 11] {
        [
            self.scale_us,
            self.gray_us,
            self.binarize_us,
            self.open_us,
            self.label_us,
            self.filter_us,
            self.cluster_us,
            self.select_us,
            self.skew_us,
            self.rectify_us,
            self.ocr_us,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionResult {
    pub status: Status,
    pub price: Option<Price>,
    /// Price zone in input image coordinates.
    pub zone: Option<Quad>,
    pub skew: Option<Angle>,
    pub branch: Option<Branch>,
    pub reason: Option<RejectReason>,
    pub timings: StageTimings,
}

impl RecognitionResult {
    pub fn is_accepted(&self) -> bool {
        self.status == Status::Accepted
    }
}

/// Intermediate products kept for debug output.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub scaled: Option<ColorImage>,
    pub raw: Option<BinaryImage>,
    pub opened: Option<BinaryImage>,
    pub candidates_opened: Vec<crate::cc::Component>,
    pub candidates_raw: Vec<crate::cc::Component>,
    pub selected: Option<Cluster>,
    /// Selected cluster box before widening.
    pub unextended: Option<crate::imgcore::Rect>,
    pub compensated: Option<Quad>,
    pub zone: Option<Quad>,
    pub crop: Option<ColorImage>,
    pub crop_binary: Option<BinaryImage>,
}

/// Configured pipeline with its recognizer.
pub struct Pipeline {
    cfg: PipelineConfig,
    recognizer: Box<dyn Recognizer>,
}

struct Clock(Instant);

impl Clock {
    fn lap(&mut self) -> u64 {
        let now = Instant::now();
        let us = now.duration_since(self.0).as_micros() as u64;
        self.0 = now;
        us
    }
}

fn member_points(lab: &Labeling, c: &Cluster) -> Vec<Point> {
    let mut pts = Vec::new();
    for m in c.members.iter().chain(c.dot.iter()) {
        let want = m.id + 1;
        for y in m.bbox.y..m.bbox.bottom() {
            for x in m.bbox.x..m.bbox.right() {
                if lab.label_at(x, y) == want {
                    pts.push(Point::new(x as f64 + 0.5, y as f64 + 0.5));
                }
            }
        }
    }
    pts
}

/// Moves the right edge of `q` outward along its top edge by `by` pixels.
fn extend_right(q: &Quad, by: f64) -> Quad {
    let (tl, tr) = (q.tl(), q.tr());
    let len = ((tr.x - tl.x).powi(2) + (tr.y - tl.y).powi(2)).sqrt();
    if len == 0.0 || by == 0.0 {
        return *q;
    }
    let (ux, uy) = ((tr.x - tl.x) / len, (tr.y - tl.y) / len);
    let mv = |p: Point| Point::new(p.x + ux * by, p.y + uy * by);
    Quad::new([q.tl(), mv(q.tr()), mv(q.br()), q.bl()])
}

/// Grows `q` by `mx` along its top edge direction and `my` along its left
/// edge direction on each side.
fn expand(q: &Quad, mx: f64, my: f64) -> Quad {
    let unit = |a: Point, b: Point| {
        let l = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt().max(1e-9);
        ((b.x - a.x) / l, (b.y - a.y) / l)
    };
    let u = unit(q.tl(), q.tr());
    let v = unit(q.tl(), q.bl());
    let mv = |p: Point, su: f64, sv: f64| {
        Point::new(p.x + su * mx * u.0 + sv * my * v.0, p.y + su * mx * u.1 + sv * my * v.1)
    };
    Quad::new([mv(q.tl(), -1.0, -1.0), mv(q.tr(), 1.0, -1.0), mv(q.br(), 1.0, 1.0), mv(q.bl(), -1.0, 1.0)])
}

fn ocr_reason(r: OcrReject) -> RejectReason {
    match r {
        OcrReject::LowConfidence => RejectReason::LowConfidence,
        OcrReject::FormatReject => RejectReason::FormatReject,
    }
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let recognizer = cfg.build_recognizer()?;
        Ok(Self { cfg, recognizer })
    }

    pub fn with_recognizer(cfg: PipelineConfig, recognizer: Box<dyn Recognizer>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, recognizer })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn run(&self, img: &ColorImage) -> RecognitionResult {
        self.execute(img, None)
    }

    /// Runs and keeps the intermediate products.
    pub fn run_traced(&self, img: &ColorImage) -> (RecognitionResult, Trace) {
        let mut t = Trace::default();
        let r = self.execute(img, Some(&mut t));
        (r, t)
    }

    fn execute(&self, img: &ColorImage, mut trace: Option<&mut Trace>) -> RecognitionResult {
        let start = Instant::now();
        let mut clock = Clock(start);
        let mut tm = StageTimings::default();
        let cfg = &self.cfg;
        let model = &cfg.tag_model;

        let scaled = scale_to_limit(img, cfg.max_width, cfg.max_height);
        tm.scale_us = clock.lap();
        let (w, h) = (scaled.width(), scaled.height());
        let (fx, fy) = (img.width() as f64 / w as f64, img.height() as f64 / h as f64);
        let to_input = |q: Quad| Quad::new(q.corners.map(|p| Point::new(p.x * fx, p.y * fy)));

        let gray = to_gray(&scaled);
        tm.gray_us = clock.lap();

        let est = model.digit_estimate(h);
        let nb = &cfg.niblack;
        let (win_w, win_h) = derive_window_scaled(&est, nb.window_width_factor, nb.window_height_factor);
        let params = NiblackParams { k: nb.k, win_w, win_h, polarity: nb.polarity, min_stddev: nb.min_stddev };
        let raw = niblack(&gray, &params);
        tm.binarize_us = clock.lap();

        let se = match cfg.se_side {
            Some(s) => StructElem::square(s).expect("validated odd side"),
            None => StructElem::for_digit_height(est.digit_h),
        };
        let opened = open(&raw, &se);
        tm.open_us = clock.lap();

        let lab_o = label(&opened);
        let lab_r = label(&raw);
        tm.label_us = clock.lap();

        let sf = derive_size_filter(model, w, h);
        let cand_o = size_filter(&lab_o.components, &sf);
        let cand_r = size_filter(&lab_r.components, &sf);
        tm.filter_us = clock.lap();

        let widen = |cs: Vec<Cluster>| -> Vec<Cluster> {
            cs.into_iter().map(|c| extend_for_missing_digits(&c, model, &c.digit_size(), w)).collect()
        };
        let cl_o = widen(cluster_by_format(&cand_o, model, &est, Branch::Opened));
        let cl_r = widen(cluster_by_format(&cand_r, model, &est, Branch::Raw));
        tm.cluster_us = clock.lap();

        let best = select_best(&cl_o, &cl_r, model, w, h);
        tm.select_us = clock.lap();

        let mut result = RecognitionResult {
            status: Status::Rejected,
            price: None,
            zone: None,
            skew: None,
            branch: None,
            reason: None,
            timings: tm,
        };
        let finish = |mut r: RecognitionResult, tm: StageTimings, reason: Option<RejectReason>| {
            r.reason = reason;
            r.status = if reason.is_none() { Status::Accepted } else { Status::Rejected };
            if reason.is_some() {
                r.price = None;
            }
            r.timings = StageTimings { total_us: start.elapsed().as_micros() as u64, ..tm };
            r
        };

        if let Some(t) = trace.as_deref_mut() {
            t.scaled = Some(scaled.clone());
            t.raw = Some(raw.clone());
            t.opened = Some(opened.clone());
            t.candidates_opened = cand_o.clone();
            t.candidates_raw = cand_r.clone();
        }

        let Some(best) = best else {
            let reason =
                if cl_o.is_empty() && cl_r.is_empty() { RejectReason::NoCluster } else { RejectReason::LowScore };
            return finish(result, tm, Some(reason));
        };
        result.branch = Some(best.branch);
        let (bin, lab) = match best.branch {
            Branch::Opened => (&opened, &lab_o),
            Branch::Raw => (&raw, &lab_r),
        };

        let has_ink = bin.crop(&best.bbox).map(|c| c.count_foreground() > 0).unwrap_or(false);
        if !has_ink {
            tm.skew_us = clock.lap();
            return finish(result, tm, Some(RejectReason::SkewEstimationEmpty));
        }
        let angle = estimate_skew(bin, &best.bbox, cfg.skew.max_deg);
        result.skew = Some(angle);
        tm.skew_us = clock.lap();

        let base = Quad::from_rect(&best.bbox);
        let compensated = compensate(&best.bbox, angle, cfg.skew.threshold_deg, w, h);
        let zone = if compensated == base {
            base
        } else {
            let ext = {
                let inner_right = best.members.iter().chain(best.dot.iter()).map(|m| m.bbox.right()).max().unwrap_or(0);
                best.bbox.right().saturating_sub(inner_right) as f64
            };
            oriented_bounds(member_points(lab, &best), angle)
                .map(|q| extend_right(&q, ext))
                .map(|q| fit_inside(q, w as f64, h as f64))
                .filter(|q| validate_quad(q, w, h).is_ok())
                .unwrap_or(compensated)
        };
        result.zone = Some(to_input(zone));

        let zh = zone.left_height();
        let m = cfg.ocr.crop_margin * zh;
        let crop_q = fit_inside(expand(&zone, m, m), w as f64, h as f64);
        let (ow, oh) = (crop_q.top_width().round().max(1.0) as usize, crop_q.left_height().round().max(1.0) as usize);
        let crop = warp_quad_to_rect(&scaled, &crop_q, ow, oh);
        if let Some(t) = trace.as_deref_mut() {
            t.selected = Some(best.clone());
            t.unextended = Some(
                best.members.iter().chain(best.dot.iter()).skip(1).fold(best.members[0].bbox, |a, c| a.union(&c.bbox)),
            );
            t.compensated = Some(compensated);
            t.zone = Some(zone);
        }
        let Ok(crop) = crop else {
            tm.rectify_us = clock.lap();
            return finish(result, tm, Some(RejectReason::EmptyZone));
        };
        let crop_gray = to_gray(&crop);
        let digit = best.digit_size();
        let (cw, ch) = derive_window_scaled(&digit, nb.window_width_factor, nb.window_height_factor);
        let crop_params = NiblackParams { win_w: cw, win_h: ch, ..params };
        let crop_bin = niblack(&crop_gray, &crop_params);
        tm.rectify_us = clock.lap();
        if let Some(t) = trace.as_mut() {
            t.crop = Some(crop);
            t.crop_binary = Some(crop_bin.clone());
        }

        let boxes = match segment_glyphs(&crop_bin) {
            Ok(b) => b,
            Err(_) => {
                tm.ocr_us = clock.lap();
                return finish(result, tm, Some(RejectReason::EmptyZone));
            }
        };
        let symbols = read_glyphs(&boxes, self.recognizer.as_ref());
        let dotted = best.dot.is_some();
        let mut formats: Vec<PriceFormat> = model.formats.iter().filter(|f| f.has_dot() == dotted).copied().collect();
        if formats.is_empty() {
            formats = model.formats.clone();
        }
        let read = postprocess(&symbols, &formats, cfg.ocr.min_conf);
        tm.ocr_us = clock.lap();
        match read {
            Ok(p) => {
                result.price = Some(p);
                finish(result, tm, None)
            }
            Err(e) => finish(result, tm, Some(ocr_reason(e))),
        }
    }
}

/// One-shot convenience: builds the recognizer from `cfg` and runs.
pub fn run_single(img: &ColorImage, cfg: &PipelineConfig) -> Result<RecognitionResult> {
    Ok(Pipeline::new(cfg.clone())?.run(img))
}

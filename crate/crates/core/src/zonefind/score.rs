use super::cluster::{Branch, Cluster};
use super::model::TagModel;

/// The four factors of a cluster score, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreTerms {
    pub format: f64,
    pub size: f64,
    pub layout: f64,
    pub count: f64,
}

const UNMATCHED_FORMAT: f64 = 0.2;

impl ScoreTerms {
    pub fn of(c: &Cluster, model: &TagModel, img_w: usize, img_h: usize) -> Self {
        let format = if c.matched_format.is_some() { 1.0 } else { UNMATCHED_FORMAT };

        let h = img_h as f64;
        let center = model.digit_h_frac.center() * h;
        let half = (model.digit_h_frac.max - model.digit_h_frac.min) / 2.0 * h;
        let size = if half > 0.0 {
            (1.0 - (c.median_height() - center).abs() / (2.0 * half)).clamp(0.0, 1.0)
        } else {
            (c.median_height() - center).abs().le(&0.5) as u8 as f64
        };

        let prior = model.price_zone_prior.to_pixels(img_w, img_h);
        let inter = c.bbox.intersection(&prior).map_or(0, |r| r.area());
        let layout = if c.bbox.area() == 0 { 0.0 } else { inter as f64 / c.bbox.area() as f64 };

        let n = c.members.len();
        let count = if c.matched_format.is_some() {
            1.0
        } else {
            model
                .formats
                .iter()
                .map(|f| {
                    let lo = f.int_digits.min;
                    let hi = f.max_digits();
                    let target = n.clamp(lo, hi);
                    n.min(target) as f64 / n.max(target) as f64
                })
                .fold(0.0, f64::max)
        };
        Self { format, size, layout, count }
    }

    pub fn combined(&self, model: &TagModel) -> f64 {
        let w = &model.weights;
        self.format.powf(w.format) * self.size.powf(w.size) * self.layout.powf(w.layout) * self.count.powf(w.count)
    }
}

/// Weighted product of format, size, layout and count terms, in `[0, 1]`.
pub fn score_cluster(c: &Cluster, model: &TagModel, img_w: usize, img_h: usize) -> f64 {
    ScoreTerms::of(c, model, img_w, img_h).combined(model)
}

/// Index of the best cluster by stored score, breaking ties by member count,
/// then the opened branch, then the leftmost box.
pub fn argmax_cluster(clusters: &[Cluster]) -> Option<usize> {
    let key = |c: &Cluster| (c.members.len(), c.branch == Branch::Opened, std::cmp::Reverse(c.bbox.x));
    (0..clusters.len()).reduce(|best, i| {
        let (a, b) = (&clusters[best], &clusters[i]);
        let better = match b.score.total_cmp(&a.score) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => key(b) > key(a),
        };
        if better {
            i
        } else {
            best
        }
    })
}

/// Scores both branches' clusters and returns the winner, or `None` when
/// nothing reaches `model.tau_zone`.
pub fn select_best(
    opened: &[Cluster],
    raw: &[Cluster],
    model: &TagModel,
    img_w: usize,
    img_h: usize,
) -> Option<Cluster> {
    let all: Vec<Cluster> = opened
        .iter()
        .chain(raw)
        .map(|c| Cluster { score: score_cluster(c, model, img_w, img_h), ..c.clone() })
        .collect();
    let best = argmax_cluster(&all)?;
    (all[best].score >= model.tau_zone).then(|| all[best].clone())
}

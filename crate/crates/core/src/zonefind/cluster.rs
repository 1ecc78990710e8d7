use serde::{Deserialize, Serialize};

use super::model::TagModel;
use crate::binarize::DigitSizeEstimate;
use crate::cc::Component;
use crate::imgcore::Rect;
use crate::price::{CountRange, PriceFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Opened,
    Raw,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Opened => "opened",
            Branch::Raw => "raw",
        }
    }
}

/// Digit candidates hypothesized to form one price string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Left to right.
    pub members: Vec<Component>,
    pub dot: Option<Component>,
    pub bbox: Rect,
    pub matched_format: Option<PriceFormat>,
    pub score: f64,
    pub branch: Branch,
    /// Digits added to the right edge by [`extend_for_missing_digits`].
    pub extended_digits: usize,
}

fn median(mut v: Vec<usize>) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}

impl Cluster {
    fn new(members: Vec<Component>, branch: Branch) -> Self {
        let bbox = members.iter().skip(1).fold(members[0].bbox, |acc, c| acc.union(&c.bbox));
        Self { members, dot: None, bbox, matched_format: None, score: 0.0, branch, extended_digits: 0 }
    }

    pub fn median_height(&self) -> f64 {
        median(self.members.iter().map(|c| c.bbox.h).collect())
    }

    pub fn median_width(&self) -> f64 {
        median(self.members.iter().map(|c| c.bbox.w).collect())
    }

    fn median_bottom(&self) -> f64 {
        median(self.members.iter().map(|c| c.bbox.bottom()).collect())
    }

    /// Member counts left and right of the dot.
    pub fn split_at_dot(&self) -> Option<(usize, usize)> {
        let d = self.dot.as_ref()?;
        let left = self.members.iter().filter(|m| m.centroid.x < d.centroid.x).count();
        Some((left, self.members.len() - left))
    }

    /// Ids of members and dot.
    pub fn component_ids(&self) -> Vec<u32> {
        self.members.iter().chain(self.dot.iter()).map(|c| c.id).collect()
    }

    /// Digit size measured on the members.
    pub fn digit_size(&self) -> DigitSizeEstimate {
        let h = self.median_height().max(4.0);
        DigitSizeEstimate { digit_h: h, digit_w: self.median_width().clamp(1.0, h) }
    }
}

fn chains_with(last: &Component, c: &Component, model: &TagModel, max_gap: f64) -> Option<isize> {
    let (a, b) = (&last.bbox, &c.bbox);
    let overlap = a.vertical_overlap(b) as f64;
    if overlap < model.v_overlap_min * a.h.min(b.h) as f64 {
        return None;
    }
    let ratio = b.h as f64 / a.h as f64;
    if !model.height_ratio.contains(ratio) {
        return None;
    }
    let gap = b.x as isize - a.right() as isize;
    (gap as f64 <= max_gap).then_some(gap)
}

/// The instantiated format for a chain, if any admissible format fits.
fn match_format(c: &Cluster, formats: &[PriceFormat]) -> Option<PriceFormat> {
    let (int, frac_present) = match c.split_at_dot() {
        Some((l, r)) => (l, Some(r)),
        None => (c.members.len(), None),
    };
    let mut fitting: Vec<&PriceFormat> = formats
        .iter()
        .filter(|f| match frac_present {
            // Fewer than two digits after the dot is a recoverable miss.
            Some(r) => f.has_dot() && r <= f.frac_digits && f.int_digits.contains(int),
            None => !f.has_dot() && f.int_digits.contains(int),
        })
        .collect();
    fitting.sort_by_key(|f| std::cmp::Reverse(f.max_digits()));
    let f = fitting.first()?;
    Some(PriceFormat { int_digits: CountRange::exactly(int), frac_digits: f.frac_digits })
}

/// Greedy left-to-right chaining of digit candidates into clusters, with dot
/// attachment and format matching. Every input component ends up in exactly
/// one cluster, as a member or as a dot.
pub fn cluster_by_format(
    comps: &[Component],
    model: &TagModel,
    digit_est: &DigitSizeEstimate,
    branch: Branch,
) -> Vec<Cluster> {
    let mut order: Vec<&Component> = comps.iter().collect();
    order.sort_by_key(|c| (c.bbox.x, c.bbox.y, c.id));

    let dot_limit = model.dot_height_max * digit_est.digit_h;
    let (small, digits): (Vec<&Component>, Vec<&Component>) =
        order.into_iter().partition(|c| c.bbox.h as f64 <= dot_limit);

    let max_gap = model.max_gap_factor * digit_est.digit_w;
    let mut chains: Vec<Vec<Component>> = Vec::new();
    for c in digits {
        let best = chains
            .iter()
            .enumerate()
            .filter_map(|(i, ch)| chains_with(ch.last().expect("nonempty"), c, model, max_gap).map(|g| (g, i)))
            .min();
        match best {
            Some((_, i)) => chains[i].push(c.clone()),
            None => chains.push(vec![c.clone()]),
        }
    }

    let mut clusters: Vec<Cluster> = chains.into_iter().map(|m| Cluster::new(m, branch)).collect();
    let mut claimed = vec![false; small.len()];
    for cl in clusters.iter_mut() {
        let mh = cl.median_height();
        let mb = cl.median_bottom();
        let adv = model.digit_advance * cl.median_width();
        let first = cl.members[0].bbox.x as f64;
        let last = cl.members.iter().map(|m| m.bbox.right()).max().expect("nonempty") as f64;
        let pick = small
            .iter()
            .enumerate()
            .filter(|(i, d)| {
                !claimed[*i]
                    && d.bbox.h as f64 <= model.dot_height_max * mh
                    && (d.bbox.bottom() as f64 - mb).abs() <= model.dot_baseline_tol * mh
                    && d.centroid.x >= first - adv
                    && d.centroid.x <= last + adv
            })
            .min_by(|(_, a), (_, b)| {
                let key = |d: &Component| {
                    let inside = d.centroid.x > first && d.centroid.x < last;
                    (!inside, (d.bbox.bottom() as f64 - mb).abs())
                };
                let (ka, kb) = (key(a), key(b));
                ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(a.id.cmp(&b.id))
            })
            .map(|(i, _)| i);
        if let Some(i) = pick {
            claimed[i] = true;
            cl.bbox = cl.bbox.union(&small[i].bbox);
            cl.dot = Some(small[i].clone());
        }
    }
    for (i, d) in small.into_iter().enumerate() {
        if !claimed[i] {
            clusters.push(Cluster::new(vec![d.clone()], branch));
        }
    }
    for cl in clusters.iter_mut() {
        cl.matched_format = match_format(cl, &model.formats);
    }
    clusters.sort_by_key(|c| (c.bbox.x, c.bbox.y, c.members[0].id));
    clusters
}

/// Widens a dotted cluster to cover fractional digits that were not found.
pub fn extend_for_missing_digits(
    c: &Cluster,
    model: &TagModel,
    digit_est: &DigitSizeEstimate,
    img_w: usize,
) -> Cluster {
    let mut out = c.clone();
    let Some((_, right)) = c.split_at_dot() else {
        return out;
    };
    if right >= 2 {
        return out;
    }
    let missing = 2 - right;
    let step = (model.digit_advance * digit_est.digit_w).round() as usize;
    let new_right = (c.bbox.right() + missing * step).min(img_w.max(c.bbox.right()));
    out.bbox.w = new_right - c.bbox.x;
    out.extended_digits = c.extended_digits + missing;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zonefind::testutil::comp;

    fn est() -> DigitSizeEstimate {
        DigitSizeEstimate { digit_h: 80.0, digit_w: 48.0 }
    }

    /// "129.99": digits 48 wide, 8 px apart, dot after the third digit.
    fn price_comps(x0: usize, y0: usize) -> Vec<Component> {
        let mut v = Vec::new();
        let mut x = x0;
        for i in 0..5u32 {
            v.push(comp(i, x, y0, 48, 80, 0.4));
            x += 56;
            if i == 2 {
                v.push(comp(10, x, y0 + 64, 16, 16, 0.78));
                x += 24;
            }
        }
        v
    }

    #[test]
    fn price_with_dot() {
        let comps = price_comps(100, 300);
        let cl = cluster_by_format(&comps, &TagModel::default(), &est(), Branch::Raw);
        assert_eq!(cl.len(), 1);
        let c = &cl[0];
        assert_eq!(c.members.len(), 5);
        assert_eq!(c.dot.as_ref().unwrap().id, 10);
        assert_eq!(c.split_at_dot(), Some((3, 2)));
        assert_eq!(c.matched_format, Some(PriceFormat { int_digits: CountRange::exactly(3), frac_digits: 2 }));
        assert_eq!(c.bbox, Rect::new(100, 300, 5 * 48 + 4 * 8 + 24, 80));
    }

    #[test]
    fn separated_groups_stay_apart() {
        let mut comps = price_comps(20, 300);
        comps.extend(price_comps(700, 300).into_iter().map(|mut c| {
            c.id += 100;
            c
        }));
        let cl = cluster_by_format(&comps, &TagModel::default(), &est(), Branch::Raw);
        assert_eq!(cl.len(), 2);
        assert!(cl.iter().all(|c| c.members.len() == 5 && c.dot.is_some()));
    }

    #[test]
    fn single_component() {
        let comps = vec![comp(0, 10, 10, 40, 80, 0.5)];
        let cl = cluster_by_format(&comps, &TagModel::default(), &est(), Branch::Opened);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].matched_format.unwrap().int_digits, CountRange::exactly(1));
        let m = TagModel {
            formats: vec![PriceFormat { int_digits: CountRange::new(2, 4), frac_digits: 0 }],
            ..Default::default()
        };
        assert!(cluster_by_format(&comps, &m, &est(), Branch::Opened)[0].matched_format.is_none());
    }

    #[test]
    fn every_component_in_exactly_one_cluster() {
        let mut comps = price_comps(100, 300);
        comps.push(comp(50, 600, 40, 12, 12, 0.8));
        comps.push(comp(51, 900, 100, 40, 70, 0.5));
        let cl = cluster_by_format(&comps, &TagModel::default(), &est(), Branch::Raw);
        let mut ids: Vec<u32> = cl.iter().flat_map(|c| c.component_ids()).collect();
        ids.sort();
        let mut want: Vec<u32> = comps.iter().map(|c| c.id).collect();
        want.sort();
        assert_eq!(ids, want);
    }

    #[test]
    fn translation_invariance() {
        let a = cluster_by_format(&price_comps(100, 300), &TagModel::default(), &est(), Branch::Raw);
        let b = cluster_by_format(&price_comps(137, 211), &TagModel::default(), &est(), Branch::Raw);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.bbox.translated(37, -89), y.bbox);
            assert_eq!(x.matched_format, y.matched_format);
        }
    }

    #[test]
    fn widening_for_missing_fraction_digits() {
        let m = TagModel::default();
        let step = (1.08f64 * 48.0).round() as usize;
        let mut comps = price_comps(100, 300);
        comps.pop();
        let c = &cluster_by_format(&comps, &m, &est(), Branch::Raw)[0];
        assert_eq!(c.split_at_dot(), Some((3, 1)));
        let e = extend_for_missing_digits(c, &m, &est(), 2000);
        assert_eq!(e.bbox.right(), c.bbox.right() + step);
        assert_eq!((e.bbox.x, e.bbox.y, e.bbox.h), (c.bbox.x, c.bbox.y, c.bbox.h));
        assert_eq!(e.extended_digits, 1);
        assert_eq!(e.members, c.members);

        let full = &cluster_by_format(&price_comps(100, 300), &m, &est(), Branch::Raw)[0];
        assert_eq!(&extend_for_missing_digits(full, &m, &est(), 2000), full);

        comps.pop();
        let c0 = &cluster_by_format(&comps, &m, &est(), Branch::Raw)[0];
        assert_eq!(c0.split_at_dot(), Some((3, 0)));
        let right = c0.bbox.right();
        assert_eq!(extend_for_missing_digits(c0, &m, &est(), 5000).bbox.right(), right + 2 * step);
        assert_eq!(extend_for_missing_digits(c0, &m, &est(), right + 30).bbox.right(), right + 30);
    }
}

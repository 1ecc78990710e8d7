use crate::cc::{self, Component};
use crate::error::{Error, Result};
use crate::imgcore::{BinaryImage, Rect};

/// One glyph inside a price crop.
#[derive(Debug, Clone, PartialEq)]
pub struct GlyphBox {
    pub rect: Rect,
    pub is_dot: bool,
    /// Glyph pixels only, sized like `rect`.
    pub mask: BinaryImage,
}

struct Group {
    rect: Rect,
    ids: Vec<u32>,
}

fn merge_overlapping(comps: &[&Component]) -> Vec<Group> {
    let mut groups: Vec<Group> = comps.iter().map(|c| Group { rect: c.bbox, ids: vec![c.id] }).collect();
    loop {
        let mut merged = false;
        'outer: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let (a, b) = (&groups[i].rect, &groups[j].rect);
                let ov = a.horizontal_overlap(b);
                if ov > 0 && 2 * ov >= a.w.min(b.w) {
                    let g = groups.remove(j);
                    groups[i].rect = groups[i].rect.union(&g.rect);
                    groups[i].ids.extend(g.ids);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return groups;
        }
    }
}

fn median(v: &mut [usize]) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}

fn trimmed(mask: BinaryImage, origin: Rect) -> Option<(Rect, BinaryImage)> {
    let r = super::atlas::ink_rect(&mask)?;
    let m = mask.crop(&r).expect("ink rect lies inside the mask");
    Some((Rect::new(origin.x + r.x, origin.y + r.y, r.w, r.h), m))
}

/// Splits a box holding several touching digits at the weakest columns
/// near the evenly spaced cut positions.
fn split_wide(rect: Rect, mask: BinaryImage, ref_h: f64) -> Vec<(Rect, BinaryImage)> {
    let pitch = 0.66 * ref_h;
    let parts = (rect.w as f64 / pitch).round() as usize;
    if rect.w as f64 <= 0.85 * ref_h || parts < 2 {
        return vec![(rect, mask)];
    }
    let ink: Vec<usize> = (0..mask.width()).map(|x| (0..mask.height()).filter(|&y| mask.get(x, y)).count()).collect();
    let search = (0.2 * ref_h).round() as usize;
    let mut cuts = vec![0];
    for k in 1..parts {
        let ideal = k * rect.w / parts;
        let lo = ideal.saturating_sub(search).max(cuts[cuts.len() - 1] + 1);
        let hi = (ideal + search).min(rect.w - 1);
        if lo >= hi {
            continue;
        }
        let cut = (lo..=hi).min_by_key(|&x| (ink[x], x.abs_diff(ideal))).expect("nonempty range");
        cuts.push(cut);
    }
    cuts.push(rect.w);
    cuts.windows(2)
        .filter_map(|w| {
            let sub = Rect::new(w[0], 0, w[1] - w[0], rect.h);
            let m = mask.crop(&sub).ok()?;
            trimmed(m, Rect::new(rect.x + w[0], rect.y, sub.w, sub.h))
        })
        .collect()
}

/// Glyph boxes of a binarized price crop, left to right.
///
/// Components overlapping horizontally by at least half the narrower width
/// merge (broken digits). Boxes between half and 1.3 times the reference
/// height are digits; small compact boxes sitting on the baseline are dots;
/// everything else is dropped.
pub fn segment_glyphs(zone: &BinaryImage) -> Result<Vec<GlyphBox>> {
    let lab = cc::label(zone);
    let (zw, zh) = (zone.width(), zone.height());
    let touches = |r: &Rect| r.x == 0 || r.y == 0 || r.right() == zw || r.bottom() == zh;
    let kept: Vec<&Component> = lab
        .components
        .iter()
        .filter(|c| !(touches(&c.bbox) && (c.bbox.h as f64) < 0.35 * zh as f64) && c.bbox.w < zw * 9 / 10)
        .collect();
    let groups = merge_overlapping(&kept);

    let mut tall: Vec<usize> = groups.iter().map(|g| g.rect.h).filter(|&h| h as f64 >= 0.4 * zh as f64).collect();
    if tall.is_empty() {
        return Err(Error::EmptyZone);
    }
    let ref_h = median(&mut tall);

    let digit_groups: Vec<&Group> =
        groups.iter().filter(|g| (0.5 * ref_h..=1.3 * ref_h).contains(&(g.rect.h as f64))).collect();
    if digit_groups.is_empty() {
        return Err(Error::EmptyZone);
    }
    let mut bottoms: Vec<usize> = digit_groups.iter().map(|g| g.rect.bottom()).collect();
    let base = median(&mut bottoms);

    let mut out = Vec::new();
    for g in &groups {
        let (h, w) = (g.rect.h as f64, g.rect.w as f64);
        let is_digit = (0.5 * ref_h..=1.3 * ref_h).contains(&h);
        let is_dot = !is_digit
            && h <= 0.35 * ref_h
            && h >= (0.08 * ref_h).max(2.0)
            && w <= 0.6 * ref_h
            && (0.4..=2.5).contains(&(w / h))
            && (g.rect.bottom() as f64 - base).abs() <= 0.25 * ref_h;
        if !is_digit && !is_dot {
            continue;
        }
        let mask = lab.mask(&g.rect, &g.ids.to_vec());
        if is_dot {
            out.push(GlyphBox { rect: g.rect, is_dot: true, mask });
        } else {
            for (rect, mask) in split_wide(g.rect, mask, ref_h) {
                out.push(GlyphBox { rect, is_dot: false, mask });
            }
        }
    }
    out.sort_by_key(|b| (b.rect.x, b.rect.y));
    Ok(out)
}

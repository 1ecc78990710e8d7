use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::font::{draw_text, GlyphStyle};
use crate::imgcore::{ColorImage, Quad, Rect};
use crate::price::Price;
use crate::zonefind::TagType;

/// One line of text drawn with the embedded font.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextBlock {
    pub text: String,
    pub left: f64,
    pub top: f64,
    pub height: f64,
    pub width_ratio: f64,
    pub stroke_ratio: f64,
    pub color: [u8; 3],
}

impl TextBlock {
    pub fn style(&self) -> GlyphStyle {
        GlyphStyle { width_ratio: self.width_ratio, stroke_ratio: self.stroke_ratio, ..GlyphStyle::new(self.height) }
    }

    pub fn width(&self) -> f64 {
        self.style().text_width(&self.text)
    }

    /// Layout box of the line.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (self.left, self.top, self.left + self.width(), self.top + self.height)
    }

    fn draw(&self, img: &mut ColorImage) -> Option<Rect> {
        draw_text(img, &self.text, &self.style(), self.left, self.top, self.color)
    }
}

/// Full layout of one synthetic tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagSpec {
    pub tag_type: TagType,
    pub price: Price,
    pub width: usize,
    pub height: usize,
    pub tag: Rect,
    pub tag_color: [u8; 3],
    pub price_block: TextBlock,
    pub labels: Vec<TextBlock>,
    pub barcode: Option<Rect>,
    /// Smaller secondary price (unit price) away from the main one.
    pub distractor: Option<TextBlock>,
}

const LETTERS: &[u8] = b"ACEHIKLMNOPRTUVXY";

fn word(rng: &mut impl Rng, len: usize) -> String {
    (0..len).map(|_| LETTERS[rng.random_range(0..LETTERS.len())] as char).collect()
}

fn label_text(rng: &mut impl Rng) -> String {
    let count = rng.random_range(1..=3);
    let mut words: Vec<String> = (0..count)
        .map(|_| {
            let len = rng.random_range(3..=8);
            word(rng, len)
        })
        .collect();
    if rng.random_bool(0.4) {
        words.push(format!("{} ML", rng.random_range(100..=999)));
    }
    words.join(" ")
}

/// Random price of the given kind, leading digit nonzero for multi-digit integer parts.
pub fn random_price(rng: &mut impl Rng, dotted: bool) -> Price {
    let digits = match rng.random_range(0..100) {
        0..25 => 1,
        25..65 => 2,
        65..95 => 3,
        _ => 4,
    };
    let int = if digits == 1 {
        rng.random_range(0..10u64)
    } else {
        rng.random_range(10u64.pow(digits - 1)..10u64.pow(digits))
    };
    if dotted {
        let frac = rng.random_range(if int == 0 { 1 } else { 0 }..100u64);
        Price { minor_units: int * 100 + frac, frac_digits: 2 }
    } else {
        Price { minor_units: int.max(1), frac_digits: 0 }
    }
}

fn ink(rng: &mut impl Rng) -> [u8; 3] {
    let v = rng.random_range(0..50);
    [v, v + rng.random_range(0..10), v + rng.random_range(0..10)]
}

impl TagSpec {
    /// Random layout for `tag_type` on a `width x height` canvas with price
    /// digits `digit_frac * height` tall (reduced if the price would not fit).
    pub fn random(
        tag_type: TagType,
        price: Price,
        width: usize,
        height: usize,
        digit_frac: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let (w, h) = (width as f64, height as f64);
        let tw = w * rng.random_range(0.86..0.96);
        let th = h * rng.random_range(0.82..0.94);
        let tx = (w - tw) * rng.random_range(0.2..0.8);
        let ty = (h - th) * rng.random_range(0.2..0.8);
        let tag = Rect::new(tx.round() as usize, ty.round() as usize, tw.round() as usize, th.round() as usize);

        let promo = tag_type == TagType::Promo;
        let tag_color = if promo {
            [rng.random_range(235..=255), rng.random_range(190..=230), rng.random_range(30..=90)]
        } else {
            let v = rng.random_range(225..=255u8);
            [v, v.saturating_sub(rng.random_range(0..8)), v.saturating_sub(rng.random_range(0..12))]
        };
        let price_color = if promo && rng.random_bool(0.5) {
            [rng.random_range(170..=210), rng.random_range(0..=40), rng.random_range(0..=40)]
        } else {
            ink(rng)
        };

        let text = price.to_string();
        let mut block = TextBlock {
            text,
            left: 0.0,
            top: 0.0,
            height: digit_frac * h,
            width_ratio: rng.random_range(0.55..0.65),
            stroke_ratio: rng.random_range(0.11..0.15),
            color: price_color,
        };
        let max_w = 0.6 * tw;
        if block.width() > max_w {
            block.height *= max_w / block.width();
        }
        let pw = block.width();
        let bottom = ty + th * (1.0 - rng.random_range(0.06..0.12));
        block.top = bottom - block.height;
        block.left = match tag_type {
            TagType::Shelf => tx + tw * rng.random_range(0.9..0.95) - pw,
            TagType::Centered => tx + tw * rng.random_range(0.45..0.55) - pw / 2.0,
            TagType::DualPrice => tx + tw * rng.random_range(0.04..0.08),
            TagType::Integer => tx + tw * rng.random_range(0.85..0.95) - pw,
            TagType::Promo => tx + tw * rng.random_range(0.88..0.95) - pw,
        };

        let mut labels = Vec::new();
        let mut y = ty + th * rng.random_range(0.05..0.09);
        for _ in 0..rng.random_range(1..=3) {
            let lh = h * rng.random_range(0.04..0.06);
            if y + lh > block.top - 0.1 * h {
                break;
            }
            let mut lb = TextBlock {
                text: label_text(rng),
                left: tx + tw * rng.random_range(0.04..0.1),
                top: y,
                height: lh,
                width_ratio: 0.6,
                stroke_ratio: rng.random_range(0.1..0.14),
                color: ink(rng),
            };
            while lb.width() > 0.85 * tw && lb.text.len() > 3 {
                lb.text.pop();
                lb.text = lb.text.trim_end().to_string();
            }
            y += lh * rng.random_range(1.5..1.9);
            labels.push(lb);
        }

        let barcode = match tag_type {
            TagType::Shelf | TagType::Integer => {
                let bx = tx + tw * 0.04;
                let bw = (tw * rng.random_range(0.22..0.3)).min(block.left - 0.05 * tw - bx);
                let bh = h * rng.random_range(0.12..0.18);
                (bw >= 0.1 * tw).then(|| {
                    Rect::new(
                        bx.round() as usize,
                        (bottom - bh).round() as usize,
                        bw.round() as usize,
                        bh.round() as usize,
                    )
                })
            }
            _ => None,
        };

        let distractor = (tag_type == TagType::DualPrice)
            .then(|| {
                let p = random_price(rng, true);
                let mut d = TextBlock {
                    text: Price { minor_units: p.minor_units % 10000, frac_digits: 2 }.to_string(),
                    left: 0.0,
                    top: 0.0,
                    height: block.height * rng.random_range(0.5..0.56),
                    width_ratio: block.width_ratio,
                    stroke_ratio: block.stroke_ratio,
                    color: block.color,
                };
                d.left = tx + tw * 0.94 - d.width();
                d.top = bottom - d.height;
                (d.left >= block.left + pw + 0.1 * tw).then_some(d)
            })
            .flatten();

        Self { tag_type, price, width, height, tag, tag_color, price_block: block, labels, barcode, distractor }
    }
}

fn fill_rect(img: &mut ColorImage, r: &Rect, c: [u8; 3]) {
    let x1 = r.right().min(img.width());
    let y1 = r.bottom().min(img.height());
    for y in r.y.min(y1)..y1 {
        for x in r.x.min(x1)..x1 {
            img.set(x, y, c);
        }
    }
}

fn fill_ellipse(img: &mut ColorImage, cx: f64, cy: f64, rx: f64, ry: f64, c: [u8; 3]) {
    let x0 = (cx - rx).floor().max(0.0) as usize;
    let y0 = (cy - ry).floor().max(0.0) as usize;
    let x1 = ((cx + rx).ceil() as usize).min(img.width());
    let y1 = ((cy + ry).ceil() as usize).min(img.height());
    for y in y0..y1 {
        for x in x0..x1 {
            let (dx, dy) = ((x as f64 + 0.5 - cx) / rx, (y as f64 + 0.5 - cy) / ry);
            if dx * dx + dy * dy <= 1.0 {
                img.set(x, y, c);
            }
        }
    }
}

fn random_color(rng: &mut impl Rng) -> [u8; 3] {
    [rng.random(), rng.random(), rng.random()]
}

/// Shelf-like background: a vertical gradient with random blocks and blobs.
pub fn render_background(width: usize, height: usize, rng: &mut impl Rng) -> ColorImage {
    let top = random_color(rng).map(|v| v / 2 + 40);
    let bot = random_color(rng).map(|v| v / 2 + 40);
    let mut px = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        let t = y as f64 / height.max(2) as f64;
        let row: [u8; 3] = std::array::from_fn(|c| (top[c] as f64 * (1.0 - t) + bot[c] as f64 * t).round() as u8);
        for _ in 0..width {
            px.extend_from_slice(&row);
        }
    }
    let mut img = ColorImage::new(width, height, px).expect("dimensions are valid");
    let (w, h) = (width as f64, height as f64);
    for _ in 0..rng.random_range(8..24) {
        let c = random_color(rng);
        if rng.random_bool(0.6) {
            let rw = w * rng.random_range(0.02..0.3);
            let rh = h * rng.random_range(0.02..0.3);
            let r = Rect::new(
                (rng.random_range(0.0..w)) as usize,
                (rng.random_range(0.0..h)) as usize,
                rw as usize + 1,
                rh as usize + 1,
            );
            fill_rect(&mut img, &r, c);
        } else {
            let rx = w * rng.random_range(0.01..0.1);
            fill_ellipse(
                &mut img,
                rng.random_range(0.0..w),
                rng.random_range(0.0..h),
                rx,
                rx * rng.random_range(0.5..2.0),
                c,
            );
        }
    }
    img
}

fn draw_barcode(img: &mut ColorImage, r: &Rect, rng: &mut impl Rng) {
    let mut x = r.x;
    while x < r.right() {
        let bar = rng.random_range(1..=4);
        let space = rng.random_range(1..=4);
        let bw = bar.min(r.right() - x);
        fill_rect(img, &Rect::new(x, r.y, bw, r.h), [20, 20, 20]);
        x += bar + space;
    }
}

/// Renders the tag; the returned quad bounds the price ink exactly.
pub fn render_tag(spec: &TagSpec, seed: u64) -> (ColorImage, Quad) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = render_background(spec.width, spec.height, &mut rng);
    fill_rect(&mut img, &spec.tag, spec.tag_color);
    for l in &spec.labels {
        l.draw(&mut img);
    }
    if let Some(b) = &spec.barcode {
        draw_barcode(&mut img, b, &mut rng);
    }
    if let Some(d) = &spec.distractor {
        d.draw(&mut img);
    }
    let zone = spec.price_block.draw(&mut img).expect("price block lies inside the canvas");
    (img, Quad::from_rect(&zone))
}

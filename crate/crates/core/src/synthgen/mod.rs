//! Seeded synthetic price-tag images with ground truth.
//!
//! Every image is fully determined by the master seed and its index; the
//! dataset is written as binary PPM files plus a CSV manifest.

mod degrade;
mod render;

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use degrade::{degrade, rotate_quad, DegradationParams, ROTATION_FILL};
pub use render::{random_price, render_background, render_tag, TagSpec, TextBlock};

use crate::error::{Error, Result};
use crate::imgcore::{pnm, ColorImage, Point, Quad};
use crate::price::Price;
use crate::zonefind::TagType;

pub const MANIFEST_VERSION_LINE: &str = "# pricetag-manifest v1";
pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegradationClass {
    Clean,
    Angle,
    Blur,
    Contrast,
    Washed,
    Noise,
    Absent,
}

impl DegradationClass {
    pub const ALL: [DegradationClass; 7] = [
        DegradationClass::Clean,
        DegradationClass::Angle,
        DegradationClass::Blur,
        DegradationClass::Contrast,
        DegradationClass::Washed,
        DegradationClass::Noise,
        DegradationClass::Absent,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DegradationClass::Clean => "clean",
            DegradationClass::Angle => "angle",
            DegradationClass::Blur => "blur",
            DegradationClass::Contrast => "contrast",
            DegradationClass::Washed => "washed",
            DegradationClass::Noise => "noise",
            DegradationClass::Absent => "absent",
        }
    }

    /// Random parameters for this class.
    pub fn sample(&self, rng: &mut impl Rng) -> DegradationParams {
        let r3 = |v: f64| (v * 1000.0).round() / 1000.0;
        let mut d = DegradationParams::default();
        match self {
            DegradationClass::Clean | DegradationClass::Absent => {}
            DegradationClass::Angle => {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                d.rotation_deg = Some(r3(sign * rng.random_range(2.0..8.0)));
            }
            DegradationClass::Blur => d.blur_sigma = Some(r3(rng.random_range(1.5..3.0))),
            DegradationClass::Contrast => d.contrast = Some(r3(rng.random_range(0.3..0.5))),
            DegradationClass::Washed => {
                d.contrast = Some(r3(rng.random_range(0.3..0.45)));
                d.flare = Some(r3(rng.random_range(40.0..80.0)));
            }
            DegradationClass::Noise => d.noise_sigma = Some(r3(rng.random_range(8.0..20.0))),
        }
        d
    }
}

/// Fractions of each degraded class and of tag-absent images; the rest is clean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mix {
    pub angle: f64,
    pub blur: f64,
    pub contrast: f64,
    pub washed: f64,
    pub noise: f64,
    pub absent: f64,
}

impl Default for Mix {
    /// Proportions of a 708-image set: 29 without a tag, 80 angled, 90
    /// blurred, 150 low-contrast, 50 washed out and 60 noisy.
    fn default() -> Self {
        let n = 708.0;
        Self {
            angle: 80.0 / n,
            blur: 90.0 / n,
            contrast: 150.0 / n,
            washed: 50.0 / n,
            noise: 60.0 / n,
            absent: 29.0 / n,
        }
    }
}

impl Mix {
    pub fn clean(&self) -> f64 {
        (1.0 - self.degraded_total()).max(0.0)
    }

    fn degraded_total(&self) -> f64 {
        self.angle + self.blur + self.contrast + self.washed + self.noise + self.absent
    }

    fn fraction(&self, c: DegradationClass) -> f64 {
        match c {
            DegradationClass::Clean => self.clean(),
            DegradationClass::Angle => self.angle,
            DegradationClass::Blur => self.blur,
            DegradationClass::Contrast => self.contrast,
            DegradationClass::Washed => self.washed,
            DegradationClass::Noise => self.noise,
            DegradationClass::Absent => self.absent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.angle, self.blur, self.contrast, self.washed, self.noise, self.absent];
        if parts.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config("mix fractions must be non-negative".into()));
        }
        if self.degraded_total() > 1.0 + 1e-9 {
            return Err(Error::Config(format!("mix fractions sum to {} > 1", self.degraded_total())));
        }
        Ok(())
    }

    /// Per-class image counts for `n` images (largest remainder rounding).
    pub fn counts(&self, n: usize) -> Vec<(DegradationClass, usize)> {
        let raw: Vec<f64> = DegradationClass::ALL.iter().map(|c| self.fraction(*c) * n as f64).collect();
        let mut counts: Vec<usize> = raw.iter().map(|v| v.floor() as usize).collect();
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
        let mut left = n - counts.iter().sum::<usize>();
        for i in order {
            if left == 0 {
                break;
            }
            counts[i] += 1;
            left -= 1;
        }
        DegradationClass::ALL.iter().copied().zip(counts).collect()
    }
}

impl FromStr for Mix {
    type Err = Error;

    /// `key=value` pairs separated by commas; unspecified classes are zero.
    /// `clean` is accepted and only checked against the total.
    fn from_str(s: &str) -> Result<Self> {
        let mut m = Mix { angle: 0.0, blur: 0.0, contrast: 0.0, washed: 0.0, noise: 0.0, absent: 0.0 };
        let mut clean = 0.0;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) =
                part.split_once('=').ok_or_else(|| Error::Config(format!("mix entry '{part}' is not key=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("mix value '{v}' is not a number")))?;
            match k.trim() {
                "clean" => clean = v,
                "angle" => m.angle = v,
                "blur" => m.blur = v,
                "contrast" => m.contrast = v,
                "washed" => m.washed = v,
                "noise" => m.noise = v,
                "absent" => m.absent = v,
                other => return Err(Error::Config(format!("unknown mix class '{other}'"))),
            }
        }
        m.validate()?;
        if clean.is_nan() || clean < 0.0 || m.degraded_total() + clean > 1.0 + 1e-9 {
            return Err(Error::Config("mix fractions sum to more than 1".into()));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub price: Option<Price>,
    pub zone: Option<Quad>,
    pub tag_type: Option<TagType>,
    pub class: DegradationClass,
    pub degradation: DegradationParams,
}

/// Per-image seed, independent of generation order.
pub fn image_seed(master: u64, index: usize) -> u64 {
    let mut z = master.wrapping_add((index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn canvas_size(rng: &mut impl Rng) -> (usize, usize) {
    let t: f64 = rng.random_range(0.0..=1.0);
    ((800.0 + 550.0 * t).round() as usize, (400.0 + 300.0 * t).round() as usize)
}

fn quad_inside(q: &Quad, w: usize, h: usize, margin: f64) -> bool {
    let (x0, y0, x1, y1) = q.bounds();
    x0 >= margin && y0 >= margin && x1 <= w as f64 - margin && y1 <= h as f64 - margin
}

fn layout_quad(spec: &TagSpec) -> Quad {
    let (x0, y0, x1, y1) = spec.price_block.bounds();
    Quad::new([Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)])
}

/// Renders image `index` of class `class`.
pub fn generate_sample(master_seed: u64, index: usize, class: DegradationClass) -> (ColorImage, GroundTruth) {
    generate(master_seed, index, class, None)
}

/// Like [`generate_sample`] on a fixed `width x height` canvas.
pub fn generate_sample_sized(
    master_seed: u64,
    index: usize,
    class: DegradationClass,
    width: usize,
    height: usize,
) -> (ColorImage, GroundTruth) {
    generate(master_seed, index, class, Some((width, height)))
}

fn generate(
    master_seed: u64,
    index: usize,
    class: DegradationClass,
    size: Option<(usize, usize)>,
) -> (ColorImage, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(image_seed(master_seed, index));
    let drawn = canvas_size(&mut rng);
    let (w, h) = size.unwrap_or(drawn);
    let mut degradation = class.sample(&mut rng);
    let render_seed: u64 = rng.random();
    let noise_seed: u64 = rng.random();

    if class == DegradationClass::Absent {
        let img = render_background(w, h, &mut ChaCha8Rng::seed_from_u64(render_seed));
        let gt = GroundTruth { price: None, zone: None, tag_type: None, class, degradation };
        return (degrade(&img, &degradation, noise_seed), gt);
    }

    let tag_type = TagType::ALL[rng.random_range(0..TagType::ALL.len())];
    let dotted = match tag_type {
        TagType::Integer => false,
        TagType::Promo => rng.random_bool(0.7),
        _ => true,
    };
    let price = random_price(&mut rng, dotted);
    let digit_frac = rng.random_range(0.16..0.24);
    let mut spec = TagSpec::random(tag_type, price, w, h, digit_frac, &mut rng);
    if let Some(deg) = degradation.rotation_deg {
        let margin = 0.02 * h as f64;
        let mut tries = 0;
        while !quad_inside(&rotate_quad(&layout_quad(&spec), deg, w, h), w, h, margin) {
            tries += 1;
            if tries > 40 {
                degradation.rotation_deg = Some((deg / 2.0 * 1000.0).round() / 1000.0);
                break;
            }
            spec = TagSpec::random(tag_type, price, w, h, digit_frac, &mut rng);
        }
    }

    let (img, zone) = render_tag(&spec, render_seed);
    let zone = match degradation.rotation_deg {
        Some(deg) if deg != 0.0 => rotate_quad(&zone, deg, w, h),
        _ => zone,
    };
    let gt = GroundTruth { price: Some(price), zone: Some(zone), tag_type: Some(tag_type), class, degradation };
    (degrade(&img, &degradation, noise_seed), gt)
}

/// Class of every index for `n` images, shuffled deterministically.
pub fn class_plan(n: usize, mix: &Mix, master_seed: u64) -> Vec<DegradationClass> {
    use rand::seq::SliceRandom;
    let mut plan: Vec<DegradationClass> =
        mix.counts(n).into_iter().flat_map(|(c, k)| std::iter::repeat_n(c, k)).collect();
    plan.shuffle(&mut ChaCha8Rng::seed_from_u64(master_seed ^ 0x05EE_DC1A_55E5));
    plan
}

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub path: String,
    pub class: DegradationClass,
    pub tag_type: Option<usize>,
    pub price_minor: Option<u64>,
    pub frac_digits: Option<usize>,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub x1: Option<f64>,
    pub y1: Option<f64>,
    pub x2: Option<f64>,
    pub y2: Option<f64>,
    pub x3: Option<f64>,
    pub y3: Option<f64>,
    pub blur_sigma: Option<f64>,
    pub noise_sigma: Option<f64>,
    pub contrast: Option<f64>,
    pub flare: Option<f64>,
    pub rotation_deg: Option<f64>,
    pub tag_absent: bool,
}

fn r3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

impl ManifestRow {
    pub fn from_truth(path: String, gt: &GroundTruth) -> Self {
        let c = gt.zone.map(|q| q.corners.map(|p| (r3(p.x), r3(p.y))));
        let at = |i: usize, y: bool| c.map(|c| if y { c[i].1 } else { c[i].0 });
        let d = &gt.degradation;
        Self {
            path,
            class: gt.class,
            tag_type: gt.tag_type.map(|t| t.index() + 1),
            price_minor: gt.price.map(|p| p.minor_units),
            frac_digits: gt.price.map(|p| p.frac_digits),
            x0: at(0, false),
            y0: at(0, true),
            x1: at(1, false),
            y1: at(1, true),
            x2: at(2, false),
            y2: at(2, true),
            x3: at(3, false),
            y3: at(3, true),
            blur_sigma: d.blur_sigma,
            noise_sigma: d.noise_sigma,
            contrast: d.contrast,
            flare: d.flare,
            rotation_deg: d.rotation_deg,
            tag_absent: gt.price.is_none(),
        }
    }

    pub fn price(&self) -> Option<Price> {
        Some(Price { minor_units: self.price_minor?, frac_digits: self.frac_digits? })
    }

    pub fn zone(&self) -> Option<Quad> {
        let p = |x: Option<f64>, y: Option<f64>| Some(Point::new(x?, y?));
        Some(Quad::new([p(self.x0, self.y0)?, p(self.x1, self.y1)?, p(self.x2, self.y2)?, p(self.x3, self.y3)?]))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Manifest(format!("{}: {m}", self.path)));
        if self.tag_absent != self.price().is_none() {
            return bad("tag_absent must match a missing price");
        }
        if !self.tag_absent && self.zone().is_none() {
            return bad("present price needs a zone");
        }
        if self.frac_digits.is_some_and(|f| f != 0 && f != 2) {
            return bad("frac_digits must be 0 or 2");
        }
        Ok(())
    }
}

/// Parsed manifest with its base directory for relative paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub base_dir: PathBuf,
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn image_path(&self, row: &ManifestRow) -> PathBuf {
        let p = Path::new(&row.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = Vec::new();
        writeln!(out, "{MANIFEST_VERSION_LINE}")?;
        {
            let mut w = csv::Writer::from_writer(&mut out);
            for r in &self.rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = fs::File::open(path)?;
        let mut first = String::new();
        BufReader::new(&f).read_line(&mut first)?;
        if first.trim_end() != MANIFEST_VERSION_LINE {
            return Err(Error::Manifest(format!("{} lacks the '{MANIFEST_VERSION_LINE}' header", path.display())));
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
        let mut rows = Vec::new();
        for r in rdr.deserialize() {
            let row: ManifestRow = r?;
            row.validate()?;
            rows.push(row);
        }
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { base_dir, rows })
    }
}

/// Writes `n` images under `out_dir/images` and `out_dir/manifest.csv`.
pub fn generate_dataset(n: usize, mix: &Mix, seed: u64, out_dir: impl AsRef<Path>) -> Result<Manifest> {
    if n == 0 {
        return Err(Error::Config("dataset size must be at least 1".into()));
    }
    mix.validate()?;
    let out_dir = out_dir.as_ref();
    let img_dir = out_dir.join("images");
    fs::create_dir_all(&img_dir)?;
    let plan = class_plan(n, mix, seed);
    let rows: Vec<ManifestRow> = plan
        .par_iter()
        .enumerate()
        .map(|(i, &class)| {
            let (img, gt) = generate_sample(seed, i, class);
            let rel = format!("images/img_{i:05}.ppm");
            pnm::write_color(out_dir.join(&rel), &img)?;
            Ok(ManifestRow::from_truth(rel, &gt))
        })
        .collect::<Result<_>>()?;
    let m = Manifest { base_dir: out_dir.to_path_buf(), rows };
    m.write(out_dir.join(MANIFEST_FILE))?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::warp_quad_to_rect;
    use crate::imgcore::{to_gray, BinaryImage, Rect};
    use crate::ocr::{postprocess, read_glyphs, segment_glyphs, TemplateRecognizer};
    use crate::price::CountRange;
    use crate::zonefind::TagModel;

    #[test]
    fn default_mix_counts_for_708() {
        let counts = Mix::default().counts(708);
        let get = |c| counts.iter().find(|x| x.0 == c).unwrap().1;
        assert_eq!(get(DegradationClass::Absent), 29);
        assert_eq!(get(DegradationClass::Angle), 80);
        assert_eq!(get(DegradationClass::Blur), 90);
        assert_eq!(get(DegradationClass::Contrast), 150);
        assert_eq!(get(DegradationClass::Washed), 50);
        assert_eq!(counts.iter().map(|c| c.1).sum::<usize>(), 708);
    }

    #[test]
    fn mix_parsing() {
        let m: Mix = "clean=0.5,blur=0.25,absent=0.25".parse().unwrap();
        assert_eq!((m.blur, m.absent, m.clean()), (0.25, 0.25, 0.5));
        assert!("blur=0.7,noise=0.6".parse::<Mix>().is_err());
        assert!("fog=0.1".parse::<Mix>().is_err());
        assert!("blur".parse::<Mix>().is_err());
    }

    #[test]
    fn seeds_differ_per_index() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|i| image_seed(7, i)).collect();
        assert_eq!(s.len(), 1000);
    }

    #[test]
    fn samples_are_deterministic() {
        for class in DegradationClass::ALL {
            let a = generate_sample(42, 3, class);
            let b = generate_sample(42, 3, class);
            assert_eq!(a, b);
            a.1.degradation.validate().unwrap();
        }
    }

    #[test]
    fn absent_sample_has_no_truth() {
        let (_, gt) = generate_sample(1, 0, DegradationClass::Absent);
        assert!(gt.price.is_none() && gt.zone.is_none());
    }

    #[test]
    fn price_height_within_model_range() {
        let m = TagModel::default();
        for i in 0..40 {
            let (img, gt) = generate_sample(9, i, DegradationClass::Clean);
            let h = gt.zone.unwrap().left_height() / img.height() as f64;
            assert!(m.digit_h_frac.contains(h), "image {i}: {h}");
            assert!(quad_inside(&gt.zone.unwrap(), img.width(), img.height(), 0.0));
        }
    }

    fn read_zone(img: &ColorImage, zone: &Quad) -> Option<Price> {
        let (x0, y0, x1, y1) = zone.bounds();
        let m = 0.15 * (y1 - y0);
        let r =
            Rect::new((x0 - m) as usize, (y0 - m) as usize, (x1 - x0 + 2.0 * m) as usize, (y1 - y0 + 2.0 * m) as usize);
        let crop = warp_quad_to_rect(img, &Quad::from_rect(&r), r.w, r.h).ok()?;
        let g = to_gray(&crop);
        let bin = BinaryImage::from_fn(g.width(), g.height(), |x, y| g.get(x, y) < 128).ok()?;
        let boxes = segment_glyphs(&bin).ok()?;
        let syms = read_glyphs(&boxes, &TemplateRecognizer::default());
        let formats = [
            crate::price::PriceFormat { int_digits: CountRange::new(1, 4), frac_digits: 2 },
            crate::price::PriceFormat { int_digits: CountRange::new(1, 5), frac_digits: 0 },
        ];
        postprocess(&syms, &formats, 0.6).ok()
    }

    #[test]
    fn ground_truth_crop_reads_back() {
        let price = Price { minor_units: 12999, frac_digits: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let spec = TagSpec::random(TagType::Shelf, price, 1000, 500, 0.2, &mut rng);
        let (img, zone) = render_tag(&spec, 42);
        assert_eq!(render_tag(&spec, 42).0, img);
        assert_eq!(read_zone(&img, &zone), Some(price));
    }

    #[test]
    fn ground_truth_covers_price_ink() {
        // Clean render: every dark pixel of the price glyphs lies inside the zone.
        let price = Price { minor_units: 4870, frac_digits: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = TagSpec::random(TagType::Centered, price, 900, 450, 0.2, &mut rng);
        let mut blank = ColorImage::filled(900, 450, [255, 255, 255]).unwrap();
        let style = spec.price_block.style();
        crate::font::draw_text(
            &mut blank,
            &spec.price_block.text,
            &style,
            spec.price_block.left,
            spec.price_block.top,
            [0, 0, 0],
        );
        let (_, zone) = render_tag(&spec, 1);
        let (x0, y0, x1, y1) = zone.bounds();
        let g = to_gray(&blank);
        for y in 0..450 {
            for x in 0..900 {
                if g.get(x, y) < 128 {
                    let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                    assert!(px > x0 && px < x1 && py > y0 && py < y1);
                }
            }
        }
    }

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mix: Mix = "blur=0.34,absent=0.33".parse().unwrap();
        let m = generate_dataset(3, &mix, 11, dir.path()).unwrap();
        let back = Manifest::read(dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(back.rows, m.rows);
        for r in &back.rows {
            let img = pnm::read_color(back.image_path(r)).unwrap();
            assert!(img.width() >= 800 && img.height() >= 400);
        }
        let dir2 = tempfile::tempdir().unwrap();
        generate_dataset(3, &mix, 11, dir2.path()).unwrap();
        assert_eq!(
            fs::read(dir.path().join(MANIFEST_FILE)).unwrap(),
            fs::read(dir2.path().join(MANIFEST_FILE)).unwrap()
        );
        assert_eq!(
            fs::read(dir.path().join("images/img_00001.ppm")).unwrap(),
            fs::read(dir2.path().join("images/img_00001.ppm")).unwrap()
        );
    }

    #[test]
    fn single_clean_row_has_no_degradation() {
        let dir = tempfile::tempdir().unwrap();
        let m = generate_dataset(1, &"".parse().unwrap(), 5, dir.path()).unwrap();
        assert_eq!(m.rows.len(), 1);
        let r = &m.rows[0];
        assert_eq!(r.class, DegradationClass::Clean);
        assert!(
            r.blur_sigma.is_none()
                && r.noise_sigma.is_none()
                && r.contrast.is_none()
                && r.flare.is_none()
                && r.rotation_deg.is_none()
        );
    }
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::collections::VecDeque;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pricetag_core::binarize::{niblack, NiblackParams, Polarity};
use pricetag_core::cc::label;
use pricetag_core::deskew::estimate_skew;
use pricetag_core::deskew::fht::{dyadic_deviation_bound, fht_horizontal};
use pricetag_core::imgcore::{BinaryImage, ColorImage, GrayImage, Point, Rect};
use pricetag_core::morph::{dilate, erode, open, StructElem};
use pricetag_core::pipeline::{
    bench_images, compute_metrics, run_manifest, write_results_csv, DatasetOptions, DatasetReport, Pipeline,
    PipelineConfig, RecognitionResult,
};
use pricetag_core::price::Price;
use pricetag_core::synthgen::{generate_dataset, generate_sample_sized, DegradationClass, Mix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, format!("took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
}

// 1 -------------------------------------------------------------------------

fn metrics_arithmetic() -> Outcome {
    let a = compute_metrics(664, 0, 13, 2);
    check(a.total() == 679, "first table total")?;
    check((a.precision, a.recall, a.accuracy) == (0.981, 0.997, 0.978), format!("first table {a:?}"))?;
    let b = compute_metrics(664, 15, 27, 2);
    check(b.total() == 708, "second table total")?;
    check((b.precision, b.recall, b.accuracy) == (0.961, 0.997, 0.959), format!("second table {b:?}"))?;
    Ok("0.981/0.997/0.978 and 0.961/0.997/0.959".into())
}

// 2 -------------------------------------------------------------------------

/// Per-pixel window statistics in floating point.
fn niblack_oracle(img: &GrayImage, k: f64, ww: usize, wh: usize, pol: Polarity) -> Vec<bool> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let (rx, ry) = ((ww / 2) as isize, (wh / 2) as isize);
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            let (mut s, mut q, mut n) = (0.0f64, 0.0f64, 0.0f64);
            for yy in (y - ry).max(0)..=(y + ry).min(h - 1) {
                for xx in (x - rx).max(0)..=(x + rx).min(w - 1) {
                    let v = img.get(xx as usize, yy as usize) as f64;
                    s += v;
                    q += v * v;
                    n += 1.0;
                }
            }
            let mean = s / n;
            let sd = (q / n - mean * mean).max(0.0).sqrt();
            let t = mean + k * sd;
            let v = img.get(x as usize, y as usize) as f64;
            out.push(match pol {
                Polarity::DarkText => v < t,
                Polarity::LightText => v > t,
            });
        }
    }
    out
}

fn niblack_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e1b);
    let sides = [3usize, 5, 9, 15];
    let mut cases = 0;
    for i in 0..100 {
        let img = GrayImage::from_fn(64, 64, |_, _| rng.random()).unwrap();
        for &ww in &sides {
            for &wh in &sides {
                for pol in [Polarity::DarkText, Polarity::LightText] {
                    let p = NiblackParams::new(-0.2, ww, wh, pol).unwrap();
                    let got = niblack(&img, &p);
                    let want = niblack_oracle(&img, -0.2, ww, wh, pol);
                    if let Some(px) = got.pixels().iter().zip(&want).position(|(a, b)| a != b) {
                        return Err(format!("image {i} window {ww}x{wh} {pol:?}: mismatch at pixel {px}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{cases} image/window/polarity cases pixel-exact in {:.1}s", start.elapsed().as_secs_f64()))
}

// 3 -------------------------------------------------------------------------

struct OracleComp {
    pixels: Vec<(usize, usize)>,
}

/// Breadth-first flood fill, 8-connected, seeds in row-major order.
fn flood_fill(img: &BinaryImage) -> Vec<OracleComp> {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut comps = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) || seen[y * w + x] {
                continue;
            }
            let mut pixels = Vec::new();
            let mut queue = VecDeque::from([(x, y)]);
            seen[y * w + x] = true;
            while let Some((cx, cy)) = queue.pop_front() {
                pixels.push((cx, cy));
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        let (nx, ny) = (cx as isize + dx, cy as isize + dy);
                        if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if img.get(nx, ny) && !seen[ny * w + nx] {
                            seen[ny * w + nx] = true;
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
            comps.push(OracleComp { pixels });
        }
    }
    comps
}

fn components_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xcc);
    let mut total = 0;
    for density in [0.1, 0.3, 0.5, 0.7] {
        for i in 0..50 {
            let img = BinaryImage::from_fn(48, 48, |_, _| rng.random_bool(density)).unwrap();
            let lab = label(&img);
            let oracle = flood_fill(&img);
            let ctx = format!("density {density} image {i}");
            check(lab.components.len() == oracle.len(), format!("{ctx}: component count"))?;
            // Oracle components are discovered in the same row-major order.
            for (c, o) in lab.components.iter().zip(&oracle) {
                let want = c.id + 1;
                check(o.pixels.iter().all(|&(x, y)| lab.label_at(x, y) == want), format!("{ctx}: partition"))?;
                check(c.pixel_count == o.pixels.len(), format!("{ctx}: pixel count"))?;
                let x0 = o.pixels.iter().map(|p| p.0).min().unwrap();
                let x1 = o.pixels.iter().map(|p| p.0).max().unwrap();
                let y0 = o.pixels.iter().map(|p| p.1).min().unwrap();
                let y1 = o.pixels.iter().map(|p| p.1).max().unwrap();
                check(c.bbox == Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1), format!("{ctx}: bbox"))?;
                let n = o.pixels.len() as f64;
                let sx: u64 = o.pixels.iter().map(|p| p.0 as u64).sum();
                let sy: u64 = o.pixels.iter().map(|p| p.1 as u64).sum();
                let centroid = Point::new(sx as f64 / n + 0.5, sy as f64 / n + 0.5);
                check(c.centroid == centroid, format!("{ctx}: centroid"))?;
            }
            let labelled = lab.labels.iter().filter(|&&l| l != 0).count();
            check(labelled == img.count_foreground(), format!("{ctx}: background labelled"))?;
            total += 1;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{total} images identical to flood fill"))
}

// 4 -------------------------------------------------------------------------

fn subset(a: &BinaryImage, b: &BinaryImage) -> bool {
    a.pixels().iter().zip(b.pixels()).all(|(&x, &y)| !x || y)
}

fn complement(a: &BinaryImage) -> BinaryImage {
    BinaryImage::from_fn(a.width(), a.height(), |x, y| !a.get(x, y)).unwrap()
}

/// Erosion with out-of-bounds pixels counted as foreground, the border rule
/// dual to the library's.
fn erode_outside_true(img: &BinaryImage, se: &StructElem) -> BinaryImage {
    let r = se.side() / 2;
    let (w, h) = (img.width(), img.height());
    let padded = BinaryImage::from_fn(w + 2 * r, h + 2 * r, |x, y| {
        let inside = x >= r && y >= r && x < w + r && y < h + r;
        !inside || img.get(x - r, y - r)
    })
    .unwrap();
    erode(&padded, se).crop(&Rect::new(r, r, w, h)).unwrap()
}

fn morphology_laws() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x3030);
    for i in 0..100 {
        let (w, h) = (rng.random_range(8..48), rng.random_range(8..48));
        let density = rng.random_range(0.2..0.9);
        let a = BinaryImage::from_fn(w, h, |_, _| rng.random_bool(density)).unwrap();
        let extra = BinaryImage::from_fn(w, h, |_, _| rng.random_bool(0.2)).unwrap();
        let b = BinaryImage::from_fn(w, h, |x, y| a.get(x, y) || extra.get(x, y)).unwrap();
        let se = StructElem::square([1, 3, 5, 7][i % 4]).unwrap();
        let oa = open(&a, &se);
        check(subset(&oa, &a), format!("image {i}: opening not anti-extensive"))?;
        check(open(&oa, &se) == oa, format!("image {i}: opening not idempotent"))?;
        check(subset(&oa, &open(&b, &se)), format!("image {i}: opening not monotone"))?;
        check(
            complement(&erode_outside_true(&complement(&a), &se)) == dilate(&a, &se),
            format!("image {i}: erode/dilate duality"),
        )?;
    }
    within(start, Duration::from_secs(10))?;
    Ok("anti-extensive, idempotent, monotone and dual on 100 images".into())
}

// 5 -------------------------------------------------------------------------

/// Row of the straight line from `(0, y)` to `(n - 1, y + s)` at column `x`.
fn line_row(y: isize, s: usize, n: usize, x: usize) -> isize {
    let t = if n > 1 { (s * x) as f64 / (n - 1) as f64 } else { 0.0 };
    y + t.round() as isize
}

/// Synthetic text: rows of words rotated by `deg` (counter-clockwise on screen).
fn text_block(w: usize, h: usize, deg: f64) -> BinaryImage {
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let (sin, cos) = deg.to_radians().sin_cos();
    BinaryImage::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
        // Undo the rotation to find the source point.
        let (px, py) = (dx * cos - dy * sin, dx * sin + dy * cos);
        if px.abs() > w as f64 * 0.35 || py.abs() > h as f64 * 0.3 {
            return false;
        }
        let line = (py + 1000.0).rem_euclid(16.0) < 9.0;
        let row = ((py + 1000.0) / 16.0).floor();
        let gap = (px + 1000.0 + row * 11.0).rem_euclid(41.0) < 6.0;
        line && !gap
    })
    .unwrap()
}

fn fht_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xf47);
    let mut cells = 0usize;
    for i in 0..20 {
        let (w, h) = (rng.random_range(20..130), rng.random_range(8..40));
        let density = rng.random_range(0.05..0.5);
        let img = BinaryImage::from_fn(w, h, |_, _| rng.random_bool(density)).unwrap();
        let px = |x: usize, y: isize| (x < w && y >= 0 && (y as usize) < h && img.get(x, y as usize)) as u32;
        let acc = fht_horizontal(&img);
        let n = acc.width();
        let b = dyadic_deviation_bound(n) as isize;
        for s in 0..acc.shifts() {
            for y in acc.min_intercept()..h as isize {
                let (mut lo, mut hi, mut exact) = (0u32, 0u32, 0u32);
                for x in 0..n {
                    let r = line_row(y, s, n, x);
                    let near = (-b..=b).map(|d| px(x, r + d));
                    lo += near.clone().min().unwrap();
                    hi += near.max().unwrap();
                    exact += px(x, r);
                }
                let v = acc.get(y, s);
                check(lo <= v && v <= hi, format!("image {i} cell ({y}, {s}) = {v} outside [{lo}, {hi}]"))?;
                if s == 0 {
                    check(v == exact, format!("image {i} row {y}: shear 0 not exact"))?;
                }
                cells += 1;
            }
        }
    }
    let mut worst = 0.0f64;
    for deg in [-10.0, -5.0, -2.0, 2.0, 5.0, 10.0] {
        let img = text_block(420, 220, deg);
        let est = estimate_skew(&img, &Rect::new(0, 0, 420, 220), 15.0).degrees;
        let err = (est - deg).abs();
        worst = worst.max(err);
        check(err <= 0.7, format!("skew {deg} estimated as {est:.2}"))?;
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{cells} cells inside the dyadic envelope; worst skew error {worst:.2} deg"))
}

// 6, 8, 9 -------------------------------------------------------------------

const DATASET_SEED: u64 = 20_240_611;
const DATASET_N: usize = 700;

struct DatasetRun {
    report: DatasetReport,
    manifest_bytes: Vec<u8>,
    csv: Vec<u8>,
    elapsed: Duration,
}

fn dataset_run(pipeline: &Pipeline) -> Result<DatasetRun, String> {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = generate_dataset(DATASET_N, &Mix::default(), DATASET_SEED, dir.path()).map_err(|e| e.to_string())?;
    let report = run_manifest(&manifest, pipeline, &DatasetOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut csv = Vec::new();
    write_results_csv(&report.records, &mut csv, false).map_err(|e| e.to_string())?;
    let manifest_bytes = std::fs::read(dir.path().join("manifest.csv")).map_err(|e| e.to_string())?;
    Ok(DatasetRun { report, manifest_bytes, csv, elapsed })
}

fn synthetic_quality(run: &DatasetRun) -> Outcome {
    let r = &run.report;
    let m = &r.metrics_correct;
    let absent = r.absent_rejection.unwrap_or(0.0);
    let summary = format!(
        "zone precision {:.3}, recall {:.3}, value accuracy {:.3}, absent rejected {:.3}, {:.1}s",
        m.precision,
        m.recall,
        r.value_accuracy,
        absent,
        run.elapsed.as_secs_f64()
    );
    check(r.errors == 0, format!("{} unreadable images", r.errors))?;
    check(m.recall >= 0.95, format!("zone recall below 0.95: {summary}"))?;
    check(m.precision >= 0.95, format!("zone precision below 0.95: {summary}"))?;
    check(r.value_accuracy >= 0.95, format!("value accuracy below 0.95: {summary}"))?;
    check(absent >= 0.90, format!("absent rejection below 0.90: {summary}"))?;
    check(run.elapsed < Duration::from_secs(120), format!("too slow: {summary}"))?;
    Ok(summary)
}

/// Canonical string re-parsed against the configured formats.
fn well_formed(p: &Price, cfg: &PipelineConfig) -> bool {
    let s = p.to_string();
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s.as_str(), None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    digits(int)
        && frac.is_none_or(digits)
        && cfg.tag_model.formats.iter().any(|f| f.fits(int.len(), frac.map(str::len)))
}

fn structurally_sound(r: &RecognitionResult, cfg: &PipelineConfig) -> Result<(), String> {
    if r.is_accepted() {
        let p = r.price.ok_or("accepted without a price")?;
        check(r.zone.is_some(), "accepted without a zone")?;
        check(well_formed(&p, cfg), format!("accepted unparseable price {p}"))?;
        check(r.reason.is_none(), "accepted with a reject reason")?;
    } else {
        check(r.price.is_none(), "rejected result carries a price")?;
        check(r.reason.is_some(), "rejected without a reason")?;
    }
    Ok(())
}

fn hostile_images() -> Vec<(&'static str, ColorImage)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbad);
    let noise =
        |w, h, rng: &mut ChaCha8Rng| ColorImage::new(w, h, (0..w * h * 3).map(|_| rng.random()).collect()).unwrap();
    vec![
        ("white", ColorImage::filled(900, 500, [255, 255, 255]).unwrap()),
        ("black", ColorImage::filled(900, 500, [0, 0, 0]).unwrap()),
        ("gray", ColorImage::filled(640, 480, [128, 128, 128]).unwrap()),
        ("noise", noise(800, 400, &mut rng)),
        ("tiny noise", noise(16, 16, &mut rng)),
        ("single pixel", ColorImage::filled(1, 1, [0, 0, 0]).unwrap()),
        ("thin row", noise(2000, 3, &mut rng)),
        ("thin column", noise(3, 1500, &mut rng)),
        ("oversized", noise(3000, 1600, &mut rng)),
        (
            "checkerboard",
            ColorImage::new(
                600,
                300,
                (0..600 * 300)
                    .flat_map(|i| {
                        let (x, y) = (i % 600, i / 600);
                        let v = if (x / 7 + y / 7) % 2 == 0 { 0 } else { 255 };
                        [v, v, v]
                    })
                    .collect(),
            )
            .unwrap(),
        ),
        (
            "stripes",
            ColorImage::new(
                700,
                350,
                (0..700 * 350)
                    .flat_map(|i| {
                        let v = if (i % 700) % 11 < 3 { 20 } else { 230 };
                        [v, v, v]
                    })
                    .collect(),
            )
            .unwrap(),
        ),
    ]
}

fn rejection_policy(runs: &[&DatasetRun], pipeline: &Pipeline) -> Outcome {
    let cfg = pipeline.config();
    let mut checked = 0;
    for run in runs {
        for rec in &run.report.records {
            match &rec.result {
                Ok(r) => structurally_sound(r, cfg).map_err(|e| format!("{}: {e}", rec.path))?,
                Err(e) => return Err(format!("{}: processing error {e}", rec.path)),
            }
            checked += 1;
        }
    }
    for (name, img) in hostile_images() {
        let r = catch_unwind(AssertUnwindSafe(|| pipeline.run(&img))).map_err(|_| format!("{name}: panicked"))?;
        structurally_sound(&r, cfg).map_err(|e| format!("{name}: {e}"))?;
        checked += 1;
    }
    for (name, bytes) in [
        ("truncated", b"P6\n40 40\n255\n\x00\x01\x02".to_vec()),
        ("garbage", b"\x89PNG\r\n\x1a\n".to_vec()),
        ("empty", Vec::new()),
        ("zero width", b"P5\n0 10\n255\n".to_vec()),
    ] {
        let decoded =
            catch_unwind(|| pricetag_core::imgcore::pnm::decode(&bytes)).map_err(|_| format!("{name}: panicked"))?;
        check(decoded.is_err(), format!("{name}: decoded"))?;
        checked += 1;
    }
    Ok(format!("{checked} inputs, no crash, no malformed acceptance"))
}

fn determinism(a: &DatasetRun, b: &DatasetRun) -> Outcome {
    check(a.manifest_bytes == b.manifest_bytes, "manifests differ")?;
    check(a.csv == b.csv, "results CSVs differ")?;
    Ok(format!("{} byte results CSV identical across two runs", a.csv.len()))
}

// 7 -------------------------------------------------------------------------

fn latency(pipeline: &Pipeline) -> Outcome {
    let start = Instant::now();
    let images: Vec<ColorImage> =
        (0..6).map(|i| generate_sample_sized(0x1a7, i, DegradationClass::Clean, 1350, 700).0).collect();
    let report = bench_images(&images, pipeline, 5, true).map_err(|e| e.to_string())?;
    let total_ms = report.total.median_us as f64 / 1000.0;
    let share = report.binarize_label_share();
    let stage_sum: u64 = report.stages.iter().map(|(_, s)| s.median_us).sum();
    let summary = format!("median {total_ms:.1} ms, binarize+label share {share:.3}");
    check(total_ms <= 100.0, format!("too slow: {summary}"))?;
    check(share <= 0.5, format!("binarization dominates: {summary}"))?;
    check(
        stage_sum as f64 <= report.total.median_us as f64 * 1.1,
        format!("stage medians {stage_sum} us exceed the total by more than 10%"),
    )?;
    within(start, Duration::from_secs(120))?;
    Ok(summary)
}

fn main() -> ExitCode {
    let pipeline = Pipeline::new(PipelineConfig::default()).expect("default config is valid");
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let guarded =
        |f: &dyn Fn() -> Outcome| catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));

    results.push((1, "metrics arithmetic", guarded(&metrics_arithmetic)));
    results.push((2, "niblack oracle equivalence", guarded(&niblack_equivalence)));
    results.push((3, "connected components oracle", guarded(&components_equivalence)));
    results.push((4, "morphology laws", guarded(&morphology_laws)));
    results.push((5, "fht fidelity and skew round trip", guarded(&fht_fidelity)));

    let first = catch_unwind(AssertUnwindSafe(|| dataset_run(&pipeline)));
    let second = catch_unwind(AssertUnwindSafe(|| dataset_run(&pipeline)));
    let (first, second) = match (first, second) {
        (Ok(Ok(a)), Ok(Ok(b))) => (Ok(a), Ok(b)),
        (a, b) => {
            let msg = |r: std::thread::Result<Result<DatasetRun, String>>| match r {
                Ok(Ok(_)) => "ok".to_string(),
                Ok(Err(e)) => e,
                Err(_) => "panicked".to_string(),
            };
            (Err(msg(a)), Err(msg(b)))
        }
    };
    match (&first, &second) {
        (Ok(a), Ok(b)) => {
            results.push((6, "synthetic end-to-end quality", guarded(&|| synthetic_quality(a))));
            results.push((7, "latency", guarded(&|| latency(&pipeline))));
            results.push((8, "rejection policy", guarded(&|| rejection_policy(&[a, b], &pipeline))));
            results.push((9, "determinism", guarded(&|| determinism(a, b))));
        }
        (a, _) => {
            let e = a.as_ref().err().cloned().unwrap_or_else(|| "second run failed".into());
            results.push((6, "synthetic end-to-end quality", Err(e.clone())));
            results.push((7, "latency", guarded(&|| latency(&pipeline))));
            results.push((8, "rejection policy", Err(e.clone())));
            results.push((9, "determinism", Err(e)));
        }
    }

    let mut failed = 0;
    println!();
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n} {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} {name}: FAIL ({why})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

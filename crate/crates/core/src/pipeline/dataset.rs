use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::PipelineConfig;
use super::metrics::{classify_outcome, ratio3, tally, Expected, Metrics, Outcome};
use super::run::{Pipeline, RecognitionResult};
use crate::error::{Error, Result};
use crate::imgcore::pnm;
use crate::synthgen::{DegradationClass, Manifest, ManifestRow};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DatasetOptions {
    /// Worker threads; 0 picks the rayon default.
    pub workers: usize,
    /// Whether a TP also needs the right value.
    pub check_value: bool,
}

/// Per-image record in manifest order.
#[derive(Debug, Clone)]
pub struct ImageRecord {
    pub path: String,
    pub class: DegradationClass,
    pub expected: Option<Expected>,
    /// `Err` holds the processing error for unreadable images.
    pub result: std::result::Result<RecognitionResult, String>,
    pub outcome: Option<Outcome>,
    pub iou: Option<f64>,
}

impl ImageRecord {
    /// Accepted with the zone found.
    pub fn zone_found(&self, zone_iou: f64) -> bool {
        matches!(&self.result, Ok(r) if r.is_accepted()) && self.iou.is_some_and(|v| v >= zone_iou)
    }

    pub fn value_correct(&self) -> bool {
        match (&self.result, &self.expected) {
            (Ok(r), Some(e)) => r.is_accepted() && r.price == Some(e.price),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassSummary {
    pub images: usize,
    pub accepted: usize,
    pub zone_found: usize,
    pub value_correct: usize,
}

#[derive(Debug, Clone)]
pub struct DatasetReport {
    pub records: Vec<ImageRecord>,
    /// Over every readable image.
    pub metrics: Metrics,
    /// Over images that contain a tag.
    pub metrics_correct: Metrics,
    /// Right value among correct images whose zone was found.
    pub value_accuracy: f64,
    /// Rejected share of tag-absent images; `None` without such images.
    pub absent_rejection: Option<f64>,
    pub errors: usize,
    pub per_class: BTreeMap<&'static str, ClassSummary>,
}

fn expected_of(row: &ManifestRow) -> Option<Expected> {
    Some(Expected { price: row.price()?, zone: row.zone()? })
}

/// Runs every manifest image through `pipeline`.
pub fn run_manifest(manifest: &Manifest, pipeline: &Pipeline, opts: &DatasetOptions) -> Result<DatasetReport> {
    let zone_iou = pipeline.config().zone_iou;
    let process = |row: &ManifestRow| -> ImageRecord {
        let expected = expected_of(row);
        let result = pnm::read_color(manifest.image_path(row)).map(|img| pipeline.run(&img)).map_err(|e| e.to_string());
        let outcome = result.as_ref().ok().map(|r| classify_outcome(r, expected.as_ref(), zone_iou, opts.check_value));
        let iou = match (&result, &expected) {
            (Ok(r), Some(e)) => r.zone.map(|z| z.iou(&e.zone)),
            _ => None,
        };
        ImageRecord { path: row.path.clone(), class: row.class, expected, result, outcome, iou }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    // Indexed collect keeps manifest order.
    let records: Vec<ImageRecord> = pool.install(|| manifest.rows.par_iter().map(process).collect());
    Ok(summarize(records, zone_iou))
}

pub fn run_dataset(
    manifest_path: impl AsRef<Path>,
    cfg: &PipelineConfig,
    opts: &DatasetOptions,
) -> Result<DatasetReport> {
    let manifest = Manifest::read(manifest_path)?;
    let pipeline = Pipeline::new(cfg.clone())?;
    run_manifest(&manifest, &pipeline, opts)
}

fn summarize(records: Vec<ImageRecord>, zone_iou: f64) -> DatasetReport {
    let metrics = tally(records.iter().filter_map(|r| r.outcome.as_ref()));
    let metrics_correct = tally(records.iter().filter(|r| r.expected.is_some()).filter_map(|r| r.outcome.as_ref()));
    let found: Vec<&ImageRecord> = records.iter().filter(|r| r.expected.is_some() && r.zone_found(zone_iou)).collect();
    let value_accuracy = ratio3(found.iter().filter(|r| r.value_correct()).count(), found.len());
    let absent: Vec<&ImageRecord> = records.iter().filter(|r| r.expected.is_none() && r.result.is_ok()).collect();
    let absent_rejection = (!absent.is_empty()).then(|| {
        let rejected = absent.iter().filter(|r| matches!(&r.result, Ok(res) if !res.is_accepted())).count();
        ratio3(rejected, absent.len())
    });
    let errors = records.iter().filter(|r| r.result.is_err()).count();
    let mut per_class: BTreeMap<&'static str, ClassSummary> = BTreeMap::new();
    for r in &records {
        let s = per_class.entry(r.class.name()).or_insert(ClassSummary {
            images: 0,
            accepted: 0,
            zone_found: 0,
            value_correct: 0,
        });
        s.images += 1;
        s.accepted += matches!(&r.result, Ok(res) if res.is_accepted()) as usize;
        s.zone_found += r.zone_found(zone_iou) as usize;
        s.value_correct += r.value_correct() as usize;
    }
    DatasetReport { records, metrics, metrics_correct, value_accuracy, absent_rejection, errors, per_class }
}

pub const RESULT_COLUMNS: [&str; 16] = [
    "path",
    "status",
    "price_minor",
    "frac_digits",
    "x0",
    "y0",
    "x1",
    "y1",
    "x2",
    "y2",
    "x3",
    "y3",
    "skew_deg",
    "branch",
    "reason",
    "total_us",
];

fn fixed3(v: f64) -> String {
    format!("{v:.3}")
}

fn result_fields(path: &str, res: &RecognitionResult) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let mut f = vec![
        path.to_string(),
        if res.is_accepted() { "accepted" } else { "rejected" }.to_string(),
        opt(res.price.map(|p| p.minor_units.to_string())),
        opt(res.price.map(|p| p.frac_digits.to_string())),
    ];
    match res.zone {
        Some(q) => f.extend(q.corners.iter().flat_map(|c| [fixed3(c.x), fixed3(c.y)])),
        None => f.extend(std::iter::repeat_n(String::new(), 8)),
    }
    f.push(opt(res.skew.map(|a| fixed3(a.degrees))));
    f.push(opt(res.branch.map(|b| b.as_str().to_string())));
    f.push(opt(res.reason.map(|r| r.as_str().to_string())));
    f
}

/// Writes the results table. Without timings the `total_us` column is
/// omitted so reruns compare byte for byte.
pub fn write_results_csv(records: &[ImageRecord], out: impl Write, with_timings: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = if with_timings { RESULT_COLUMNS.len() } else { RESULT_COLUMNS.len() - 1 };
    w.write_record(&RESULT_COLUMNS[..n])?;
    for r in records {
        let mut fields = match &r.result {
            Ok(res) => result_fields(&r.path, res),
            Err(_) => {
                let mut f = vec![r.path.clone(), "error".to_string()];
                f.extend(std::iter::repeat_n(String::new(), 12));
                f.push("processing-error".to_string());
                f
            }
        };
        if with_timings {
            fields.push(r.result.as_ref().map(|res| res.timings.total_us.to_string()).unwrap_or_default());
        }
        w.write_record(&fields)?;
    }
    w.flush().map_err(Error::Io)?;
    Ok(())
}

pub fn save_results_csv(records: &[ImageRecord], path: impl AsRef<Path>, with_timings: bool) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_results_csv(records, std::io::BufWriter::new(f), with_timings)
}

impl DatasetReport {
    /// Human-readable summary.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let line = |s: &mut String, name: &str, m: &Metrics| {
            s.push_str(&format!(
                "{name:<14} tp={} tn={} fp={} fn={}  precision={:.3} recall={:.3} accuracy={:.3}\n",
                m.tp, m.tn, m.fp, m.fn_, m.precision, m.recall, m.accuracy
            ));
        };
        line(&mut s, "all images", &self.metrics);
        line(&mut s, "correct only", &self.metrics_correct);
        s.push_str(&format!("value accuracy {:.3}\n", self.value_accuracy));
        if let Some(a) = self.absent_rejection {
            s.push_str(&format!("absent rejected {a:.3}\n"));
        }
        if self.errors > 0 {
            s.push_str(&format!("processing errors {}\n", self.errors));
        }
        for (name, c) in &self.per_class {
            s.push_str(&format!(
                "  {name:<9} images={:<4} accepted={:<4} zone={:<4} value={}\n",
                c.images, c.accepted, c.zone_found, c.value_correct
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::{Quad, Rect};
    use crate::pipeline::{RejectReason, StageTimings, Status};
    use crate::price::Price;

    fn record(path: &str, result: std::result::Result<RecognitionResult, String>) -> ImageRecord {
        ImageRecord {
            path: path.into(),
            class: DegradationClass::Clean,
            expected: None,
            result,
            outcome: None,
            iou: None,
        }
    }

    #[test]
    fn csv_layout() {
        let ok = RecognitionResult {
            status: Status::Accepted,
            price: Some(Price::new(12999, 2).unwrap()),
            zone: Some(Quad::from_rect(&Rect::new(1, 2, 10, 5))),
            skew: None,
            branch: Some(crate::zonefind::Branch::Raw),
            reason: None,
            timings: StageTimings { total_us: 77, ..Default::default() },
        };
        let rej = RecognitionResult {
            status: Status::Rejected,
            price: None,
            zone: None,
            skew: None,
            branch: None,
            reason: Some(RejectReason::NoCluster),
            timings: StageTimings::default(),
        };
        let recs = vec![record("a.ppm", Ok(ok)), record("b.ppm", Ok(rej)), record("c.ppm", Err("io".into()))];
        let mut buf = Vec::new();
        write_results_csv(&recs, &mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RESULT_COLUMNS.join(","));
        assert_eq!(lines[1], "a.ppm,accepted,12999,2,1.000,2.000,11.000,2.000,11.000,7.000,1.000,7.000,,raw,,77");
        assert_eq!(lines[2], "b.ppm,rejected,,,,,,,,,,,,,no-cluster,0");
        assert_eq!(lines[3], "c.ppm,error,,,,,,,,,,,,,processing-error,");

        let mut buf = Vec::new();
        write_results_csv(&recs, &mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.split(',').count() == 15));
        assert!(!text.contains("total_us"));
    }
}

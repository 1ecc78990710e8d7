//! End-to-end recognition: scaling, binarization, zone search, skew
//! compensation, rectification and OCR.

mod bench;
mod config;
mod dataset;
mod debug;
mod metrics;
mod run;

pub use bench::{bench, bench_images, BenchReport, LatencyStats};
pub use config::{NiblackConfig, OcrConfig, PipelineConfig, RecognizerKind, SkewConfig};
pub use dataset::{
    run_dataset, run_manifest, save_results_csv, write_results_csv, ClassSummary, DatasetOptions, DatasetReport,
    ImageRecord, RESULT_COLUMNS,
};
pub use debug::{draw_quad, draw_rect, draw_segment, write_debug};
pub use metrics::{classify_outcome, compute_metrics, ratio3, tally, Expected, Metrics, Outcome};
pub use run::{run_single, Pipeline, RecognitionResult, RejectReason, StageTimings, Status, Trace};

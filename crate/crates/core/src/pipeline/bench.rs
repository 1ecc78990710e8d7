use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::PipelineConfig;
use super::run::{Pipeline, StageTimings};
use crate::error::{Error, Result};
use crate::imgcore::{pnm, ColorImage};
use crate::synthgen::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatencyStats {
    pub median_us: u64,
    pub p90_us: u64,
}

impl LatencyStats {
    /// Nearest-rank median and 90th percentile.
    pub fn of(samples: &[u64]) -> Self {
        if samples.is_empty() {
            return Self { median_us: 0, p90_us: 0 };
        }
        let mut v = samples.to_vec();
        v.sort_unstable();
        let rank = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Self { median_us: rank(0.5), p90_us: rank(0.9) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub images: usize,
    pub repetitions: usize,
    pub single_thread: bool,
    pub stages: Vec<(&'static str, LatencyStats)>,
    pub total: LatencyStats,
}

impl BenchReport {
    pub fn stage(&self, name: &str) -> Option<LatencyStats> {
        self.stages.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
    }

    /// Share of the end-to-end median spent in binarization and labeling.
    pub fn binarize_label_share(&self) -> f64 {
        let part = self.stage("binarize").map_or(0, |s| s.median_us) + self.stage("label").map_or(0, |s| s.median_us);
        if self.total.median_us == 0 {
            0.0
        } else {
            part as f64 / self.total.median_us as f64
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "{} images x {} reps, {}\n{:<10} {:>10} {:>10}\n",
            self.images,
            self.repetitions,
            if self.single_thread { "single thread" } else { "parallel" },
            "stage",
            "median_us",
            "p90_us"
        );
        for (name, st) in self.stages.iter().chain(std::iter::once(&("total", self.total))) {
            s.push_str(&format!("{name:<10} {:>10} {:>10}\n", st.median_us, st.p90_us));
        }
        s.push_str(&format!("binarize+label share {:.3}\n", self.binarize_label_share()));
        s
    }
}

/// Times `reps` warm runs over every image.
pub fn bench_images(
    images: &[ColorImage],
    pipeline: &Pipeline,
    reps: usize,
    single_thread: bool,
) -> Result<BenchReport> {
    if reps < 3 {
        return Err(Error::Config(format!("bench needs at least 3 repetitions, got {reps}")));
    }
    if images.is_empty() {
        return Err(Error::Config("bench needs at least one image".into()));
    }
    for img in images {
        pipeline.run(img);
    }
    let mut samples: Vec<StageTimings> = Vec::with_capacity(images.len() * reps);
    for _ in 0..reps {
        if single_thread {
            samples.extend(images.iter().map(|img| pipeline.run(img).timings));
        } else {
            samples.par_extend(images.par_iter().map(|img| pipeline.run(img).timings));
        }
    }
    let stages = StageTimings::STAGES
        .iter()
        .enumerate()
        .map(|(i, name)| (*name, LatencyStats::of(&samples.iter().map(|t| t.stages()[i]).collect::<Vec<_>>())))
        .collect();
    let total = LatencyStats::of(&samples.iter().map(|t| t.total_us).collect::<Vec<_>>());
    Ok(BenchReport { images: images.len(), repetitions: reps, single_thread, stages, total })
}

pub fn bench(
    manifest_path: impl AsRef<Path>,
    cfg: &PipelineConfig,
    reps: usize,
    single_thread: bool,
) -> Result<BenchReport> {
    let manifest = Manifest::read(manifest_path)?;
    let images = manifest.rows.iter().map(|r| pnm::read_color(manifest.image_path(r))).collect::<Result<Vec<_>>>()?;
    bench_images(&images, &Pipeline::new(cfg.clone())?, reps, single_thread)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let s = LatencyStats::of(&[5, 1, 4, 2, 3, 6, 7, 8, 9, 10]);
        assert_eq!((s.median_us, s.p90_us), (5, 9));
        assert_eq!(LatencyStats::of(&[7]), LatencyStats { median_us: 7, p90_us: 7 });
        assert_eq!(LatencyStats::of(&[]).median_us, 0);
    }
}

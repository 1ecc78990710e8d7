use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::binarize::{Polarity, WINDOW_HEIGHT_FACTOR, WINDOW_WIDTH_FACTOR};
use crate::deskew::{DEFAULT_MAX_SKEW_DEG, DEFAULT_SKEW_THRESHOLD_DEG};
use crate::error::{Error, Result};
use crate::imgcore::{DEFAULT_MAX_H, DEFAULT_MAX_W};
use crate::ocr::{GlyphAtlas, Recognizer, TemplateRecognizer};
use crate::zonefind::TagModel;

/// Niblack settings; the window itself is derived from the digit size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NiblackConfig {
    pub k: f64,
    pub window_width_factor: f64,
    pub window_height_factor: f64,
    pub polarity: Polarity,
    pub min_stddev: f64,
}

impl Default for NiblackConfig {
    fn default() -> Self {
        Self {
            k: -0.2,
            window_width_factor: WINDOW_WIDTH_FACTOR,
            window_height_factor: WINDOW_HEIGHT_FACTOR,
            polarity: Polarity::DarkText,
            min_stddev: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SkewConfig {
    /// Skews at or below this stay uncompensated.
    pub threshold_deg: f64,
    pub max_deg: f64,
}

impl Default for SkewConfig {
    fn default() -> Self {
        Self { threshold_deg: DEFAULT_SKEW_THRESHOLD_DEG, max_deg: DEFAULT_MAX_SKEW_DEG }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecognizerKind {
    Template,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OcrConfig {
    pub recognizer: RecognizerKind,
    /// Template directory; the built-in atlas when absent.
    pub atlas_dir: Option<PathBuf>,
    pub min_conf: f64,
    /// Margin around the zone for the recognition crop, relative to zone height.
    pub crop_margin: f64,
}

impl Default for OcrConfig {
    fn default() -> Self {
        Self { recognizer: RecognizerKind::Template, atlas_dir: None, min_conf: 0.6, crop_margin: 0.15 }
    }
}

/// Everything the pipeline needs; serialized as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub max_width: usize,
    pub max_height: usize,
    pub niblack: NiblackConfig,
    /// Opening element side; derived from the digit height when absent.
    pub se_side: Option<usize>,
    pub tag_model: TagModel,
    pub skew: SkewConfig,
    pub ocr: OcrConfig,
    /// IoU at which a zone counts as found.
    pub zone_iou: f64,
    pub debug: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            max_width: DEFAULT_MAX_W,
            max_height: DEFAULT_MAX_H,
            niblack: NiblackConfig::default(),
            se_side: None,
            tag_model: TagModel::default(),
            skew: SkewConfig::default(),
            ocr: OcrConfig::default(),
            zone_iou: 0.5,
            debug: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.max_width < 16 || self.max_height < 16 {
            return bad(format!("size limit {}x{} is too small", self.max_width, self.max_height));
        }
        let n = &self.niblack;
        if !(-1.0..=1.0).contains(&n.k) {
            return bad(format!("niblack.k = {} outside [-1, 1]", n.k));
        }
        if !(n.window_width_factor > 0.0 && n.window_height_factor > 0.0) {
            return bad("niblack window factors must be positive".into());
        }
        if !(n.min_stddev >= 0.0 && n.min_stddev.is_finite()) {
            return bad("niblack.min_stddev must be non-negative".into());
        }
        if let Some(s) = self.se_side {
            if s == 0 || s % 2 == 0 {
                return bad(format!("se_side {s} must be odd"));
            }
        }
        self.tag_model.validate()?;
        if !(0.0..=45.0).contains(&self.skew.threshold_deg) || !(0.0..=20.0).contains(&self.skew.max_deg) {
            return bad("skew threshold must lie in [0, 45] and max_deg in [0, 20]".into());
        }
        if !(0.0..=1.0).contains(&self.ocr.min_conf) || !(0.0..=1.0).contains(&self.ocr.crop_margin) {
            return bad("ocr.min_conf and ocr.crop_margin must lie in [0, 1]".into());
        }
        if !(self.zone_iou > 0.0 && self.zone_iou <= 1.0) {
            return bad("zone_iou must lie in (0, 1]".into());
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build_recognizer(&self) -> Result<Box<dyn Recognizer>> {
        match self.ocr.recognizer {
            RecognizerKind::Template => {
                let atlas = match &self.ocr.atlas_dir {
                    Some(dir) => GlyphAtlas::load_dir(dir)?,
                    None => GlyphAtlas::builtin(),
                };
                Ok(Box::new(TemplateRecognizer::new(atlas)))
            }
        }
    }
}

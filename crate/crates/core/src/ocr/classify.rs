use super::atlas::{normalize, GlyphAtlas};
use crate::imgcore::BinaryImage;

/// Pluggable glyph classifier.
pub trait Recognizer: Send + Sync {
    fn name(&self) -> &str;
    /// Best symbol and a confidence in `[0, 1]`.
    fn classify(&self, glyph: &BinaryImage) -> (char, f64);
}

/// Fraction of grid cells where `a` and `b` agree.
pub fn match_fraction(a: &BinaryImage, b: &BinaryImage) -> f64 {
    let same = a.pixels().iter().zip(b.pixels()).filter(|(x, y)| x == y).count();
    same as f64 / a.pixels().len() as f64
}

/// Nearest-template classification; ties go to the earlier symbol.
pub fn classify_template(glyph: &BinaryImage, atlas: &GlyphAtlas) -> (char, f64) {
    let g = normalize(glyph, atlas.width, atlas.height);
    let mut best = ('?', f64::NEG_INFINITY);
    for (ch, t) in &atlas.templates {
        let s = match_fraction(&g, t);
        if s > best.1 {
            best = (*ch, s);
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct TemplateRecognizer {
    atlas: GlyphAtlas,
}

impl TemplateRecognizer {
    pub fn new(atlas: GlyphAtlas) -> Self {
        Self { atlas }
    }

    pub fn atlas(&self) -> &GlyphAtlas {
        &self.atlas
    }
}

impl Default for TemplateRecognizer {
    fn default() -> Self {
        Self::new(GlyphAtlas::builtin())
    }
}

impl Recognizer for TemplateRecognizer {
    fn name(&self) -> &str {
        "template"
    }

    fn classify(&self, glyph: &BinaryImage) -> (char, f64) {
        classify_template(glyph, &self.atlas)
    }
}

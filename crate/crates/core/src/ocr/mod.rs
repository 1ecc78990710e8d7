//! Glyph segmentation, template recognition and price normalization.

mod atlas;
mod classify;
mod post;
mod segment;

pub use atlas::{ink_rect, normalize, GlyphAtlas, SYMBOLS, TEMPLATE_H, TEMPLATE_W};
pub use classify::{classify_template, match_fraction, Recognizer, TemplateRecognizer};
pub use post::{postprocess, OcrReject};
pub use segment::{segment_glyphs, GlyphBox};

/// Classifies each glyph box in order.
pub fn read_glyphs(boxes: &[GlyphBox], rec: &dyn Recognizer) -> Vec<(char, f64)> {
    boxes.iter().map(|b| rec.classify(&b.mask)).collect()
}

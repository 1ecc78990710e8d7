use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::font::{self, GlyphStyle};
use crate::imgcore::{pnm, BinaryImage, Rect};

/// Recognized symbols in tie-break order.
pub const SYMBOLS: [char; 11] = ['0', '1', '2', '3', '4', '5', '6', '7', '8', '9', '.'];
pub const TEMPLATE_W: usize = 16;
pub const TEMPLATE_H: usize = 24;
const RENDER_HEIGHT: f64 = 96.0;
const MANIFEST: &str = "manifest.json";

/// One normalized binary template per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct GlyphAtlas {
    pub font: String,
    pub width: usize,
    pub height: usize,
    /// Same order as [`SYMBOLS`].
    pub templates: Vec<(char, BinaryImage)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    symbol: char,
    file: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtlasManifest {
    font: String,
    width: usize,
    height: usize,
    symbols: Vec<ManifestEntry>,
}

/// Bounding rect of the foreground, if any.
pub fn ink_rect(img: &BinaryImage) -> Option<Rect> {
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.get(x, y) {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    (x0 != usize::MAX).then(|| Rect::from_inclusive(x0, y0, x1, y1))
}

/// Nearest-neighbor resize of the ink bounds of `img` to `w x h`. An empty
/// image maps to an empty grid.
pub fn normalize(img: &BinaryImage, w: usize, h: usize) -> BinaryImage {
    let Some(r) = ink_rect(img) else {
        return BinaryImage::filled(w, h, false).expect("template size is nonzero");
    };
    BinaryImage::from_fn(w, h, |u, v| {
        let x = r.x + ((u * 2 + 1) * r.w) / (2 * w);
        let y = r.y + ((v * 2 + 1) * r.h) / (2 * h);
        img.get(x, y)
    })
    .expect("template size is nonzero")
}

fn file_name(symbol: char) -> String {
    if symbol == '.' {
        "dot.pgm".into()
    } else {
        format!("{symbol}.pgm")
    }
}

impl GlyphAtlas {
    /// Templates rendered from the embedded stroke font.
    pub fn builtin() -> Self {
        let style = GlyphStyle::new(RENDER_HEIGHT);
        let templates = SYMBOLS
            .iter()
            .map(|&ch| {
                let cov = font::rasterize(ch, &style, 0.0, 0.0).expect("font covers every symbol");
                let glyph = BinaryImage::new(cov.width, cov.height, cov.values.iter().map(|&v| v >= 0.5).collect())
                    .expect("coverage grid is consistent");
                (ch, normalize(&glyph, TEMPLATE_W, TEMPLATE_H))
            })
            .collect();
        Self { font: font::FONT_NAME.into(), width: TEMPLATE_W, height: TEMPLATE_H, templates }
    }

    pub fn validate(&self) -> Result<()> {
        let symbols: Vec<char> = self.templates.iter().map(|t| t.0).collect();
        if symbols != SYMBOLS {
            return Err(Error::Config(format!("atlas symbols {symbols:?} differ from {SYMBOLS:?}")));
        }
        for (ch, t) in &self.templates {
            if t.width() != self.width || t.height() != self.height {
                return Err(Error::Config(format!("atlas template '{ch}' has the wrong size")));
            }
            if t.count_foreground() == 0 {
                return Err(Error::Config(format!("atlas template '{ch}' is empty")));
            }
        }
        Ok(())
    }

    /// Writes one PGM per symbol plus `manifest.json`.
    pub fn save_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut symbols = Vec::new();
        for (ch, t) in &self.templates {
            let file = file_name(*ch);
            pnm::write_binary(dir.join(&file), t)?;
            symbols.push(ManifestEntry { symbol: *ch, file });
        }
        let m = AtlasManifest { font: self.font.clone(), width: self.width, height: self.height, symbols };
        fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&m)?)?;
        Ok(())
    }

    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let m: AtlasManifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST))?)?;
        let mut templates = Vec::new();
        for e in &m.symbols {
            if e.file.contains(['/', '\\']) {
                return Err(Error::Config(format!("atlas file name {} must be local", e.file)));
            }
            templates.push((e.symbol, pnm::read_binary(dir.join(&e.file))?));
        }
        templates.sort_by_key(|(c, _)| SYMBOLS.iter().position(|s| s == c).unwrap_or(usize::MAX));
        let atlas = Self { font: m.font, width: m.width, height: m.height, templates };
        atlas.validate()?;
        Ok(atlas)
    }

    pub fn template(&self, symbol: char) -> Option<&BinaryImage> {
        self.templates.iter().find(|t| t.0 == symbol).map(|t| &t.1)
    }
}

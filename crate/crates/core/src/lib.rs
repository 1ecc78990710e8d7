//! Price zone localization and recognition for price-tag photographs.
//!
//! The pipeline binarizes the input with a Niblack threshold sized from the
//! expected digit height, runs connected-component analysis on both an
//! opened and a raw copy of the mask, clusters digit candidates under the
//! admissible price formats, picks the best cluster against the tag layout,
//! estimates skew with a fast Hough transform, rectifies the zone on the
//! color image and reads it with a pluggable glyph recognizer. Anything that
//! cannot be read with confidence is rejected.

pub mod binarize;
pub mod cc;
pub mod deskew;
pub mod error;
pub mod font;
pub mod imgcore;
pub mod morph;
pub mod ocr;
pub mod pipeline;
pub mod price;
pub mod synthgen;
pub mod zonefind;

pub use error::{Error, Result};

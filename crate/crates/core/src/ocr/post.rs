use serde::{Deserialize, Serialize};

use crate::price::{Price, PriceFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OcrReject {
    LowConfidence,
    FormatReject,
}

/// Normalizes a symbol string to a price, or rejects it.
///
/// Accepts digits with at most one dot followed by exactly two digits, when
/// every confidence reaches `min_conf` and some admissible format takes the
/// digit counts. Multi-digit integer parts may not start with zero.
pub fn postprocess(symbols: &[(char, f64)], formats: &[PriceFormat], min_conf: f64) -> Result<Price, OcrReject> {
    if symbols.is_empty() {
        return Err(OcrReject::FormatReject);
    }
    if symbols.iter().any(|&(_, c)| c.is_nan() || c < min_conf) {
        return Err(OcrReject::LowConfidence);
    }
    let s: String = symbols.iter().map(|&(c, _)| c).collect();
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s.as_str(), None),
    };
    let all_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int) || frac.is_some_and(|f| !all_digits(f)) {
        return Err(OcrReject::FormatReject);
    }
    if int.len() > 1 && int.starts_with('0') {
        return Err(OcrReject::FormatReject);
    }
    if !formats.iter().any(|f| f.fits(int.len(), frac.map(str::len))) {
        return Err(OcrReject::FormatReject);
    }
    let digits: String = int.chars().chain(frac.unwrap_or("").chars()).collect();
    let minor: u64 = digits.parse().map_err(|_| OcrReject::FormatReject)?;
    Ok(Price { minor_units: minor, frac_digits: frac.map_or(0, str::len) })
}

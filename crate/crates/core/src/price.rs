//! Price values and admissible price formats.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive count range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

impl CountRange {
    pub const fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }

    pub const fn exactly(n: usize) -> Self {
        Self { min: n, max: n }
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.min..=self.max).contains(&n)
    }
}

/// Integer digits, optionally followed by a dot and exactly two fractional
/// digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceFormat {
    pub int_digits: CountRange,
    pub frac_digits: usize,
}

impl PriceFormat {
    pub fn new(int_digits: CountRange, frac_digits: usize) -> Result<Self> {
        let f = Self { int_digits, frac_digits };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.int_digits.min < 1 || self.int_digits.min > self.int_digits.max {
            return Err(Error::Config(format!("invalid integer digit range {:?}", self.int_digits)));
        }
        if self.frac_digits != 0 && self.frac_digits != 2 {
            return Err(Error::Config(format!("fractional digits must be 0 or 2, got {}", self.frac_digits)));
        }
        Ok(())
    }

    pub fn has_dot(&self) -> bool {
        self.frac_digits == 2
    }

    /// Largest digit count the format admits.
    pub fn max_digits(&self) -> usize {
        self.int_digits.max + self.frac_digits
    }

    /// Whether a string with `int` integer digits and `frac` fractional
    /// digits (None = no dot) fits this format.
    pub fn fits(&self, int: usize, frac: Option<usize>) -> bool {
        match frac {
            None => !self.has_dot() && self.int_digits.contains(int),
            Some(f) => self.has_dot() && f == self.frac_digits && self.int_digits.contains(int),
        }
    }
}

/// Price in minor units, e.g. 129.99 is `{ minor_units: 12999, frac_digits: 2 }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Price {
    pub minor_units: u64,
    pub frac_digits: usize,
}

impl Price {
    pub fn new(minor_units: u64, frac_digits: usize) -> Result<Self> {
        if frac_digits != 0 && frac_digits != 2 {
            return Err(Error::Config(format!("fractional digits must be 0 or 2, got {frac_digits}")));
        }
        Ok(Self { minor_units, frac_digits })
    }

    pub fn integer_part(&self) -> u64 {
        match self.frac_digits {
            2 => self.minor_units / 100,
            _ => self.minor_units,
        }
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.frac_digits {
            2 => write!(f, "{}.{:02}", self.minor_units / 100, self.minor_units % 100),
            _ => write!(f, "{}", self.minor_units),
        }
    }
}

//! Pinned two-sided ratio bands.
//!
//! File format, one record per line:
//!
//! ```text
//! # comment
//! version 1
//! <case id> <band lo> <band hi>
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{FockError, Result};

/// Relative slack applied when a pinned band is re-checked on new data.
pub const SLACK: f64 = 0.2;

const BUILTIN: &str = include_str!("../calibration/bands.txt");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(FockError::Parse(format!("invalid band [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// The band widened by a relative `slack` on both sides.
    pub fn widened(&self, slack: f64) -> Band {
        Band {
            lo: self.lo * (1.0 - slack),
            hi: self.hi * (1.0 + slack),
        }
    }

    pub fn ratio(&self) -> f64 {
        self.hi / self.lo
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub version: u32,
    bands: BTreeMap<String, Band>,
}

impl Calibration {
    pub fn parse(text: &str) -> Result<Self> {
        let mut version = None;
        let mut bands = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || FockError::Parse(format!("calibration line {}: {raw:?}", no + 1));
            match fields.as_slice() {
                ["version", v] => version = Some(v.parse::<u32>().map_err(|_| bad())?),
                [id, lo, hi] => {
                    let lo: f64 = lo.parse().map_err(|_| bad())?;
                    let hi: f64 = hi.parse().map_err(|_| bad())?;
                    if bands.insert(id.to_string(), Band::new(lo, hi)?).is_some() {
                        return Err(FockError::Parse(format!("duplicate calibration id {id}")));
                    }
                }
                _ => return Err(bad()),
            }
        }
        let version = version
            .ok_or_else(|| FockError::Parse("calibration file lacks a version line".into()))?;
        Ok(Self { version, bands })
    }

    /// The calibration compiled into the crate.
    pub fn builtin() -> &'static Calibration {
        static CAL: OnceLock<Calibration> = OnceLock::new();
        CAL.get_or_init(|| Calibration::parse(BUILTIN).expect("builtin calibration parses"))
    }

    pub fn band(&self, id: &str) -> Result<Band> {
        self.bands
            .get(id)
            .copied()
            .ok_or_else(|| FockError::Parse(format!("no calibration band named {id}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Band)> {
        self.bands.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

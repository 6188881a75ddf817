//! Published Lyapunov exponent tables for the two reference orbits,
//! bundled for side-by-side comparison with computed estimates.
//!
//! Some rows of the second table hold malformed numerals; they are kept
//! verbatim and marked unusable.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::parse_decimal;

const CASE1_CSV: &str = include_str!("../paper_tables/lyapunov_case1.csv");
const CASE2_CSV: &str = include_str!("../paper_tables/lyapunov_case2.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceCase {
    /// Orbit from x0 = 0.5.
    Case1,
    /// Orbit from x0 = 5e-7.
    Case2,
}

impl ReferenceCase {
    pub fn x0(self) -> f64 {
        match self {
            ReferenceCase::Case1 => 0.5,
            ReferenceCase::Case2 => 5e-7,
        }
    }

    pub fn csv(self) -> &'static str {
        match self {
            ReferenceCase::Case1 => CASE1_CSV,
            ReferenceCase::Case2 => CASE2_CSV,
        }
    }
}

impl fmt::Display for ReferenceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceCase::Case1 => "case1",
            ReferenceCase::Case2 => "case2",
        })
    }
}

impl FromStr for ReferenceCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "case1" => Ok(ReferenceCase::Case1),
            "case2" => Ok(ReferenceCase::Case2),
            other => Err(Error::InvalidArgument(format!("unknown reference case '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceEntry {
    /// 1-based iteration as printed; iteration `k` corresponds to `lambdas[k - 1]`.
    pub iteration: usize,
    pub raw: String,
    /// `None` when `raw` is not a valid decimal.
    pub value: Option<f64>,
}

/// Parses a two-column `iteration,lambda` table.
pub fn parse_reference(text: &str) -> Result<Vec<ReferenceEntry>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "iteration,lambda" => {}
        _ => {
            return Err(Error::Parse { line: 1, message: "expected header 'iteration,lambda'".into() })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (it, raw) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: "expected two columns".into(),
        })?;
        let iteration = it.trim().parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("bad iteration '{it}'"),
        })?;
        let raw = raw.trim().to_string();
        let value = parse_decimal(&raw);
        out.push(ReferenceEntry { iteration, raw, value });
    }
    Ok(out)
}

pub fn load_reference(case: ReferenceCase) -> Vec<ReferenceEntry> {
    parse_reference(case.csv()).expect("bundled reference tables are well formed")
}

//! Verification harness: sup-norm measurement, error reports and the
//! bound-checking suites behind `verify` and `report`.

mod suites;
mod sup;

use std::fmt;
use std::str::FromStr;

pub use suites::{run_suite, SuiteConfig};
pub use sup::{sup_error, SupConfig, SupError};

use crate::error::{Error, Result};

/// Slack on `measured / bound` before a report counts as a violation.
pub const RATIO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Interp,
    Projector,
    Coefficients,
    Lemma22,
    Quantizer,
    Covering,
    Decomposition,
    Pipeline,
    Budget,
    Params,
    Serialization,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Interp,
        Suite::Projector,
        Suite::Coefficients,
        Suite::Lemma22,
        Suite::Quantizer,
        Suite::Covering,
        Suite::Decomposition,
        Suite::Pipeline,
        Suite::Budget,
        Suite::Params,
        Suite::Serialization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Interp => "interp",
            Suite::Projector => "projector",
            Suite::Coefficients => "coefficients",
            Suite::Lemma22 => "lemma22",
            Suite::Quantizer => "quantizer",
            Suite::Covering => "covering",
            Suite::Decomposition => "decomposition",
            Suite::Pipeline => "pipeline",
            Suite::Budget => "budget",
            Suite::Params => "params",
            Suite::Serialization => "serialization",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite `{s}`")))
    }
}

/// One measured quantity against its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub suite: Suite,
    /// Function spec, or a short description of the checked object.
    pub spec: String,
    pub d: usize,
    pub alpha: f64,
    pub m: u32,
    pub n: u32,
    pub measured_error: f64,
    pub bound: f64,
    pub ratio: f64,
    pub grid_level: u32,
    pub random_points: usize,
    pub subsampled: bool,
    pub runtime_ms: u64,
    pub detail: String,
}

impl ErrorReport {
    /// CSV column order.
    pub const CSV_HEADER: [&'static str; 14] = [
        "suite",
        "spec",
        "d",
        "alpha",
        "m",
        "n",
        "measured_error",
        "bound",
        "ratio",
        "grid_level",
        "random_points",
        "subsampled",
        "runtime_ms",
        "detail",
    ];

    /// `measured / bound`, with a zero bound demanding an exact zero.
    pub fn ratio_of(measured: f64, bound: f64) -> f64 {
        if bound > 0.0 {
            measured / bound
        } else if measured == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn violation(&self) -> bool {
        !(self.ratio <= 1.0 + RATIO_TOL)
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.suite.to_string(),
            self.spec.clone(),
            self.d.to_string(),
            format!("{:?}", self.alpha),
            self.m.to_string(),
            self.n.to_string(),
            format!("{:?}", self.measured_error),
            format!("{:?}", self.bound),
            format!("{:?}", self.ratio),
            self.grid_level.to_string(),
            self.random_points.to_string(),
            self.subsampled.to_string(),
            self.runtime_ms.to_string(),
            self.detail.clone(),
        ]
    }

    /// `key: value` block, one field per line in CSV column order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in Self::CSV_HEADER.iter().zip(self.csv_record()) {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn ratios() {
        assert_eq!(ErrorReport::ratio_of(1.0, 2.0), 0.5);
        assert_eq!(ErrorReport::ratio_of(0.0, 0.0), 0.0);
        assert_eq!(ErrorReport::ratio_of(1e-20, 0.0), f64::INFINITY);
    }
}

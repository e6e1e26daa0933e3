//! Solver-grounded verification of constructed systems.
//!
//! Every verdict re-runs (block) GMRES on the constructed matrix and
//! compares the trace against the prescription.

mod construction;
mod theorems;

pub use construction::{verify_block, verify_full, verify_scalar};
pub use theorems::{
    check_mirroring, check_peak_plateau, check_rank, MirrorEvent, MirroringReport,
    PeakPlateauReport, PlateauRow, PLATEAU_FLOOR, THEOREM_TOL,
};

use serde::Serialize;

/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Tolerance used once a factor is badly conditioned.
pub const WIDE_TOL: f64 = 1e-6;
pub const COND_WARN: f64 = 1e12;
pub const COND_REFUSE: f64 = 1e14;

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tolerance: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// Passes iff `deviation <= tolerance` (NaN fails).
    pub fn measured(name: &str, deviation: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: deviation <= tolerance,
            deviation,
            tolerance,
            detail: detail.into(),
        }
    }

    pub fn failed(name: &str, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: false,
            deviation: f64::INFINITY,
            tolerance: 0.0,
            detail: detail.into(),
        }
    }

    pub fn flag(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            deviation: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        VerificationReport {
            scenario: scenario.into(),
            checks: Vec::new(),
            warnings: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Names of the failing checks.
    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Worst deviation and where it happened.
#[derive(Default)]
pub(crate) struct Worst {
    pub value: f64,
    pub at: String,
    /// First location whose deviation exceeds the tolerance.
    pub first_bad: Option<String>,
}

impl Worst {
    pub fn update(&mut self, dev: f64, tol: f64, loc: String) {
        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
        if dev > tol && self.first_bad.is_none() {
            self.first_bad = Some(loc.clone());
        }
        if dev > self.value || self.at.is_empty() {
            self.value = dev;
            self.at = loc;
        }
    }

    pub fn into_check(self, name: &str, tol: f64) -> Check {
        let detail = match &self.first_bad {
            Some(loc) => format!("first violation at {loc}; worst at {}", self.at),
            None => format!("worst at {}", self.at),
        };
        Check::measured(name, self.value, tol, detail)
    }
}

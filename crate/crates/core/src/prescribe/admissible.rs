use std::fmt;

use super::{contains_zero, is_flat, FullPrescription, ScalarPrescription};

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// 1-based cycle, if the violation belongs to one.
    pub cycle: Option<usize>,
    /// Residual index `j` of `f_j` (or step index for Ritz data).
    pub step: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.cycle, self.step) {
            (Some(k), Some(j)) => write!(f, "cycle {k}, step {j}: {}", self.message),
            (Some(k), None) => write!(f, "cycle {k}: {}", self.message),
            (None, Some(j)) => write!(f, "step {j}: {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

/// Every violated constraint of a prescription; empty means admissible.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdmissibilityReport {
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(
        &mut self,
        cycle: Option<usize>,
        step: Option<usize>,
        message: impl Into<String>,
    ) {
        self.violations.push(Violation {
            cycle,
            step,
            message: message.into(),
        });
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

fn check_values(rep: &mut AdmissibilityReport, cycle: Option<usize>, f: &[f64]) {
    for (j, &v) in f.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) {
            rep.push(
                cycle,
                Some(j),
                format!("residual value {v} must be positive and finite"),
            );
        }
    }
}

/// Monotonicity and the stagnation rule: a flat step `f_j = f_{j-1}` happens
/// exactly when zero is among the Ritz values of step `j`.
fn check_steps(
    rep: &mut AdmissibilityReport,
    cycle: Option<usize>,
    f: &[f64],
    ritz: &[Vec<crate::linalg::C64>],
) {
    for j in 1..f.len() {
        if f[j] > f[j - 1] && !is_flat(f[j - 1], f[j]) {
            rep.push(
                cycle,
                Some(j),
                format!("residual increases ({} > {})", f[j], f[j - 1]),
            );
            continue;
        }
        let Some(theta) = ritz.get(j - 1) else {
            continue;
        };
        let flat = is_flat(f[j - 1], f[j]);
        let zero = contains_zero(theta);
        if flat && !zero {
            rep.push(
                cycle,
                Some(j),
                "stagnation incompatible with nonsingular H_j (no zero Ritz value)",
            );
        } else if zero && !flat {
            rep.push(
                cycle,
                Some(j),
                "zero Ritz value requires stagnation (f_j = f_{j-1})",
            );
        }
    }
}

fn check_ritz_shapes(
    rep: &mut AdmissibilityReport,
    cycle: Option<usize>,
    ritz: &[Vec<crate::linalg::C64>],
    count: usize,
) {
    if ritz.len() != count {
        rep.push(
            cycle,
            None,
            format!("expected Ritz data for {count} steps, got {}", ritz.len()),
        );
        return;
    }
    for (i, set) in ritz.iter().enumerate() {
        if set.len() != i + 1 {
            rep.push(
                cycle,
                Some(i + 1),
                format!(
                    "step {} needs {} Ritz values, got {}",
                    i + 1,
                    i + 1,
                    set.len()
                ),
            );
        }
        if set.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            rep.push(cycle, Some(i + 1), "non-finite Ritz value");
        }
    }
}

pub fn validate_full(p: &FullPrescription) -> AdmissibilityReport {
    let mut rep = AdmissibilityReport::default();
    let n = p.n();
    if n == 0 {
        rep.push(None, None, "empty residual sequence");
        return rep;
    }
    check_values(&mut rep, None, &p.residuals);
    check_ritz_shapes(&mut rep, None, &p.ritz, n - 1);
    if p.eigenvalues.len() != n {
        rep.push(
            None,
            None,
            format!("expected {n} eigenvalues, got {}", p.eigenvalues.len()),
        );
    }
    if contains_zero(&p.eigenvalues) {
        rep.push(
            None,
            Some(n),
            "zero eigenvalue forces stagnation at the final step",
        );
    }
    if rep.is_ok() {
        check_steps(&mut rep, None, &p.residuals, &p.ritz);
    }
    rep
}

pub fn validate_admissible(p: &ScalarPrescription) -> AdmissibilityReport {
    let mut rep = AdmissibilityReport::default();
    if p.m == 0 || p.cycles == 0 {
        rep.push(None, None, "cycle length and cycle count must be positive");
        return rep;
    }
    if p.residuals.len() != p.cycles || p.ritz.len() != p.cycles || p.spectra.len() != p.cycles {
        rep.push(
            None,
            None,
            format!(
                "residual, Ritz and spectral data must cover {} cycles",
                p.cycles
            ),
        );
        return rep;
    }
    for k in 0..p.cycles {
        let c = Some(k + 1);
        if p.residuals[k].len() != p.m {
            rep.push(
                c,
                None,
                format!(
                    "expected {} residual values, got {}",
                    p.m,
                    p.residuals[k].len()
                ),
            );
            continue;
        }
        check_values(&mut rep, c, &p.residuals[k]);
        check_ritz_shapes(&mut rep, c, &p.ritz[k], p.m);
        if p.spectra[k].len() != p.m + 1 {
            rep.push(
                c,
                None,
                format!(
                    "expected {} cycle eigenvalues, got {}",
                    p.m + 1,
                    p.spectra[k].len()
                ),
            );
        }
    }
    if let Some(t) = p.terminal {
        if !(t.is_finite() && t > 0.0) {
            rep.push(
                Some(p.cycles),
                Some(p.m),
                format!("terminal value {t} must be positive and finite"),
            );
        }
    }
    if let Some(tail) = &p.tail {
        if tail.len() != p.n() {
            rep.push(
                None,
                None,
                format!("tail vector has length {}, expected {}", tail.len(), p.n()),
            );
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    for k in 0..p.cycles {
        let c = Some(k + 1);
        let f = p.cycle_values(k);
        check_steps(&mut rep, c, &f[..p.m], &p.ritz[k]);
        let (last, next) = (f[p.m - 1], f[p.m]);
        if !(next < last) || is_flat(last, next) {
            let what = if k + 1 < p.cycles {
                "non-strict transition"
            } else {
                "terminal value must be below the last residual"
            };
            rep.push(c, Some(p.m), format!("{what} ({next} >= {last})"));
        }
        if contains_zero(&p.ritz[k][p.m - 1]) {
            rep.push(c, Some(p.m), "zero Ritz value at the last step means end-of-cycle stagnation, which cannot be constructed");
        }
    }
    rep
}

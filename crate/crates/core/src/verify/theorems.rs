use serde::Serialize;

use crate::block::quadratic_form;
use crate::krylov::{end_of_cycle_runs, flat_between, RunTrace};
use crate::linalg::{inverse, norm2};
use crate::prescribe::KrylovRank;

use super::Check;

/// Relative tolerance for the mirrored equality and the peak-plateau identity.
pub const THEOREM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct MirrorEvent {
    /// 1-based cycle whose end stagnates.
    pub cycle: usize,
    pub s: usize,
    /// Stagnation direction (block case), as `[re, im]` pairs.
    pub direction: Option<Vec<[f64; 2]>>,
    /// Residual norms at steps `0..=s` of the next cycle.
    pub next_start: Vec<f64>,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MirroringReport {
    pub events: Vec<MirrorEvent>,
    pub tolerance: f64,
    pub pass: bool,
}

impl MirroringReport {
    pub fn to_check(&self) -> Check {
        let dev = self.events.iter().map(|e| e.deviation).fold(0.0, f64::max);
        let detail = if self.events.is_empty() {
            "no end-of-cycle stagnation (vacuous)".to_string()
        } else {
            format!("{} end-of-cycle stagnation event(s)", self.events.len())
        };
        Check {
            name: "mirroring".into(),
            pass: self.pass,
            deviation: dev,
            tolerance: self.tolerance,
            detail,
        }
    }
}

/// Every flat run of length `s` at the end of a cycle must reappear as `s`
/// flat steps at the start of the next cycle (along the same direction for
/// block runs).
pub fn check_mirroring(trace: &RunTrace) -> MirroringReport {
    let tol = THEOREM_TOL;
    let mut events = Vec::new();
    for run in end_of_cycle_runs(trace) {
        let Some(next) = trace.cycles.get(run.cycle + 1) else {
            continue;
        };
        let s = run.s;
        let next_start: Vec<f64> = next.norms().into_iter().take(s + 1).collect();
        let deviation = if next.steps() < s {
            f64::INFINITY
        } else {
            let g0 = next.residuals[0].gram();
            let gs = next.residuals[s].gram();
            let scale = norm2(&g0).max(f64::MIN_POSITIVE);
            match &run.direction {
                None if trace.p == 1 => {
                    (gs[(0, 0)].re.sqrt() - g0[(0, 0)].re.sqrt()).abs() / g0[(0, 0)].re.sqrt()
                }
                None => (&g0 - &gs).norm() / scale,
                Some(u) => quadratic_form(&(&g0 - &gs), u).abs() / scale,
            }
        };
        events.push(MirrorEvent {
            cycle: run.cycle + 1,
            s,
            direction: run
                .direction
                .as_ref()
                .map(|u| u.iter().map(|z| [z.re, z.im]).collect()),
            next_start,
            deviation,
            pass: deviation <= tol,
        });
    }
    let pass = events.iter().all(|e| e.pass);
    MirroringReport {
        events,
        tolerance: tol,
        pass,
    }
}

/// Cycles whose final residual is below this fraction of the cancellation
/// scale `||R_0|| + ||H|| ||Y||` of `R_0 - A V Y` are skipped by the
/// peak-plateau check.
pub const PLATEAU_FLOOR: f64 = 1e-6;

/// Left and right side of the identity at one step (Frobenius norms of the
/// `p x p` sides in the block case).
#[derive(Clone, Debug, Serialize)]
pub struct PlateauRow {
    pub cycle: usize,
    pub step: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeakPlateauReport {
    pub max_deviation: f64,
    /// Number of (cycle, step) pairs where the identity was tested.
    pub checked: usize,
    /// 1-based (cycle, step) pairs where FOM does not exist.
    pub nonexistent: Vec<(usize, usize)>,
    /// Disagreements between FOM nonexistence and stagnation.
    pub mismatches: Vec<String>,
    /// Both sides of the identity at every tested step.
    pub rows: Vec<PlateauRow>,
    pub tolerance: f64,
    pub pass: bool,
}

impl PeakPlateauReport {
    pub fn to_check(&self) -> Check {
        let detail = if self.mismatches.is_empty() {
            format!(
                "{} steps checked, {} without FOM iterate",
                self.checked,
                self.nonexistent.len()
            )
        } else {
            self.mismatches.join("; ")
        };
        Check {
            name: "peak_plateau".into(),
            pass: self.pass,
            deviation: self.max_deviation,
            tolerance: self.tolerance,
            detail,
        }
    }
}

/// GMRES residual components along the Arnoldi blocks against FOM residuals.
///
/// With `W_i = V_{i+1}^* R_m`, `Gamma = R_m^* R_m` and `Z_i` the FOM residual
/// coefficient block (`Z_0 = F_0`): `Gamma^{-1} W_i^* W_i Gamma^{-1} = (Z_i^* Z_i)^{-1}`.
/// For `p = 1` this is `|v_{i+1}^* r_m| / ||r_m|| = ||r_m|| / ||r_i^F||`.
/// Where no FOM iterate exists the step must be flat and `W_i` singular.
pub fn check_peak_plateau(trace: &RunTrace) -> PeakPlateauReport {
    let tol = THEOREM_TOL;
    let p = trace.p;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut nonexistent = Vec::new();
    let mut mismatches = Vec::new();
    let mut rows = Vec::new();
    let mut x_prev: Option<&crate::linalg::CMat> = None;
    for (k, c) in trace.cycles.iter().enumerate() {
        let rm = &c.r_end;
        let step_norm = x_prev.map_or(c.x.norm(), |x| (&c.x - x).norm());
        x_prev = Some(&c.x);
        // the components of a residual this small carry no relative accuracy
        if rm.norm() <= PLATEAU_FLOOR * (c.r_start.norm() + norm2(&c.decomp.h) * step_norm) {
            continue;
        }
        let rnorm = rm.norm();
        let gamma = rm.adjoint() * rm;
        let Ok(gamma_inv) = inverse(&gamma) else {
            mismatches.push(format!(
                "cycle {}: singular final residual Gram matrix",
                k + 1
            ));
            continue;
        };
        let blocks = c.decomp.v.ncols() / p;
        for i in 0..=c.steps() {
            if i >= blocks {
                break;
            }
            let w = c.decomp.v_block(i).adjoint() * rm;
            let z = if i == 0 {
                Some(c.decomp.start.matrix().clone())
            } else {
                c.fom[i - 1].coefficient.clone()
            };
            let flat = i > 0 && flat_between(p, &c.residuals[i - 1], &c.residuals[i]).is_some();
            match z {
                Some(z) => {
                    if flat {
                        mismatches.push(format!(
                            "cycle {} step {i}: flat step but FOM iterate exists",
                            k + 1
                        ));
                    }
                    let (dev, l, r) = if p == 1 {
                        let lhs = w[(0, 0)].norm() / rnorm;
                        let rhs = rnorm / z[(0, 0)].norm();
                        ((lhs - rhs).abs() / rhs, lhs, rhs)
                    } else {
                        let lhs = &gamma_inv * (w.adjoint() * &w) * &gamma_inv;
                        match inverse(&(z.adjoint() * &z)) {
                            Ok(rhs) => ((&lhs - &rhs).norm() / rhs.norm(), lhs.norm(), rhs.norm()),
                            Err(_) => (f64::INFINITY, lhs.norm(), f64::INFINITY),
                        }
                    };
                    rows.push(PlateauRow {
                        cycle: k + 1,
                        step: i,
                        lhs: l,
                        rhs: r,
                    });
                    checked += 1;
                    worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
                }
                None => {
                    nonexistent.push((k + 1, i));
                    if !flat {
                        mismatches.push(format!(
                            "cycle {} step {i}: no FOM iterate but the residual decreased",
                            k + 1
                        ));
                    }
                    let sv = w.clone().svd(false, false).singular_values;
                    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
                    if smin > tol * rnorm {
                        mismatches.push(format!(
                            "cycle {} step {i}: no FOM iterate but V^*R_m is nonsingular",
                            k + 1
                        ));
                    }
                }
            }
        }
    }
    let pass = worst <= tol && mismatches.is_empty();
    PeakPlateauReport {
        max_deviation: worst,
        checked,
        nonexistent,
        mismatches,
        rows,
        tolerance: tol,
        pass,
    }
}

/// Restarted Krylov matrix is rank deficient iff some cycle before the last
/// ends in stagnation.
pub fn check_rank(trace: &RunTrace, rank: &KrylovRank) -> Check {
    let n = rank.k.nrows();
    if rank.k.ncols() != n {
        return Check::failed(
            "rank",
            format!(
                "restarted Krylov matrix is {}x{}, not square",
                n,
                rank.k.ncols()
            ),
        );
    }
    let last = trace.cycles.len().saturating_sub(1);
    let stagnating: Vec<usize> = end_of_cycle_runs(trace)
        .iter()
        .filter(|r| r.cycle < last)
        .map(|r| r.cycle + 1)
        .collect();
    let deficient = !rank.full_rank;
    let pass = stagnating.is_empty() != deficient;
    Check {
        name: "rank".into(),
        pass,
        deviation: rank.min_ratio,
        tolerance: 1e-10,
        detail: format!(
            "rank {} of {n} (min R ratio {:.3e}); end-of-cycle stagnation in cycles {:?}",
            rank.rank, rank.min_ratio, stagnating
        ),
    }
}

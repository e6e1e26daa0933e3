use crate::linalg::{hermitian_eig, norm2, CVec};

use super::RunTrace;

/// Relative threshold for declaring a step flat.
pub const STAGNATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum StagnationKind {
    /// The whole residual Gram matrix is unchanged (always the case for `p = 1`).
    Total,
    /// Unchanged along `direction` only.
    Partial { direction: CVec },
}

/// Step `step` (1-based) of `cycle` (0-based) did not reduce the residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Stagnation {
    pub cycle: usize,
    pub step: usize,
    pub kind: StagnationKind,
}

impl Stagnation {
    pub fn direction(&self) -> Option<&CVec> {
        match &self.kind {
            StagnationKind::Total => None,
            StagnationKind::Partial { direction } => Some(direction),
        }
    }
}

/// Flat steps of every cycle.
///
/// Scalar: `|f_j - f_{j-1}| <= 1e-10 f_{j-1}`. Block: the smallest eigenvalue
/// of `Gamma_{j-1} - Gamma_j` is at most `1e-10 ||Gamma_{j-1}||`; total when
/// the largest one is too.
pub fn stagnation_steps(trace: &RunTrace) -> Vec<Stagnation> {
    let mut out = Vec::new();
    for (k, c) in trace.cycles.iter().enumerate() {
        if trace.p == 1 {
            let f = c.norms();
            for j in 1..f.len() {
                if f[j - 1] > 0.0 && (f[j] - f[j - 1]).abs() <= STAGNATION_TOL * f[j - 1] {
                    out.push(Stagnation {
                        cycle: k,
                        step: j,
                        kind: StagnationKind::Total,
                    });
                }
            }
            continue;
        }
        let grams = c.grams();
        for j in 1..grams.len() {
            let scale = norm2(&grams[j - 1]);
            if scale == 0.0 {
                continue;
            }
            let tol = STAGNATION_TOL * scale;
            let (vals, vecs) = hermitian_eig(&(&grams[j - 1] - &grams[j]));
            if vals[vals.len() - 1] <= tol {
                out.push(Stagnation {
                    cycle: k,
                    step: j,
                    kind: StagnationKind::Total,
                });
            } else if vals[0] <= tol {
                out.push(Stagnation {
                    cycle: k,
                    step: j,
                    kind: StagnationKind::Partial {
                        direction: vecs.column(0).into_owned(),
                    },
                });
            }
        }
    }
    out
}

/// `s` flat steps at the end of `cycle`, along `direction` in the block case:
/// the Gram difference between step `steps - s` and the last step is
/// singular, and `s` is maximal.
#[derive(Clone, Debug, PartialEq)]
pub struct EndRun {
    pub cycle: usize,
    pub s: usize,
    pub direction: Option<CVec>,
}

/// Maximal flat runs ending at the last step of each cycle.
pub fn end_of_cycle_runs(trace: &RunTrace) -> Vec<EndRun> {
    let mut out = Vec::new();
    for (k, c) in trace.cycles.iter().enumerate() {
        let last = c.steps();
        let mut best: Option<EndRun> = None;
        for s in 1..=last {
            let a = last - s;
            match flat_between(trace.p, &c.residuals[a], &c.residuals[last]) {
                Some(direction) => {
                    best = Some(EndRun {
                        cycle: k,
                        s,
                        direction,
                    })
                }
                None => break,
            }
        }
        out.extend(best);
    }
    out
}

/// `Some(direction)` if the residual did not decrease between the two
/// normalizing quantities (along `direction` for `p > 1`).
pub fn flat_between(
    p: usize,
    earlier: &crate::block::NormalizingQuantity,
    later: &crate::block::NormalizingQuantity,
) -> Option<Option<CVec>> {
    if p == 1 {
        let (a, b) = (earlier.frobenius(), later.frobenius());
        return (a > 0.0 && (a - b).abs() <= STAGNATION_TOL * a).then_some(None);
    }
    let ga = earlier.gram();
    let scale = norm2(&ga);
    if scale == 0.0 {
        return None;
    }
    let (vals, vecs) = hermitian_eig(&(&ga - later.gram()));
    (vals[0] <= STAGNATION_TOL * scale).then(|| Some(vecs.column(0).into_owned()))
}

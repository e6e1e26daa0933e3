//! Constructing `(A, b)` with prescribed full and restarted GMRES behavior.

mod admissible;
mod assembly;
mod factor;
mod full;
mod restarted;

pub use admissible::{validate_admissible, validate_full, AdmissibilityReport, Violation};
pub(crate) use assembly::krylov_rank;
pub use assembly::{Assembly, KrylovRank};
pub use factor::{build_cycle_hessenberg, build_d, build_u_inv, CycleFactor, HessenbergFactor};
pub use full::{construct_full_gmres, FullConstruction};
pub use restarted::{construct_restarted, restarted_krylov_matrix, RestartedConstruction};

use crate::error::{Error, Result};
use crate::linalg::{identity, orthonormality_residual, random_unitary, CMat, C64};

/// Global orthonormal basis in which the constructed system is expressed.
#[derive(Clone, Debug, PartialEq)]
pub enum Basis {
    Standard,
    RandomUnitary { seed: u64 },
    Explicit(CMat),
}

impl Basis {
    /// The `n x n` unitary `Q`; the construction becomes `(Q A Q^*, Q b)`.
    pub fn unitary(&self, n: usize) -> Result<CMat> {
        match self {
            Basis::Standard => Ok(identity(n)),
            Basis::RandomUnitary { seed } => Ok(random_unitary(n, *seed)),
            Basis::Explicit(q) => {
                if q.shape() != (n, n) {
                    return Err(Error::Dimension(format!(
                        "explicit basis is {:?}, expected {n}x{n}",
                        q.shape()
                    )));
                }
                let res = orthonormality_residual(q);
                if res > 1e-10 {
                    return Err(Error::Parse(format!(
                        "explicit basis is not unitary (residual {res:e})"
                    )));
                }
                Ok(q.clone())
            }
        }
    }
}

/// Full GMRES: `n` residual norms, Ritz values for steps `1..n`, and the
/// eigenvalues of `A`.
#[derive(Clone, Debug)]
pub struct FullPrescription {
    /// `f_0 >= f_1 >= ... >= f_{n-1} > 0`
    pub residuals: Vec<f64>,
    /// `ritz[j-1]` holds the `j` Ritz values of step `j`, `j = 1..n-1`.
    pub ritz: Vec<Vec<C64>>,
    pub eigenvalues: Vec<C64>,
    pub basis: Basis,
}

impl FullPrescription {
    pub fn n(&self) -> usize {
        self.residuals.len()
    }
}

/// Restarted GMRES with `cycles` cycles of length `m`, `n = m * cycles`.
#[derive(Clone, Debug)]
pub struct ScalarPrescription {
    pub m: usize,
    pub cycles: usize,
    /// `residuals[k]` holds `f_0, ..., f_{m-1}` of cycle `k`. The first value
    /// of cycle `k+1` is the transition value closing cycle `k`.
    pub residuals: Vec<Vec<f64>>,
    /// Value closing the last cycle's factor; defaults to half its last residual.
    /// It only enters the subdiagonal entry used by the tail update.
    pub terminal: Option<f64>,
    /// `ritz[k][j-1]`: the `j` Ritz values of step `j` in cycle `k`, `j = 1..m`.
    pub ritz: Vec<Vec<Vec<C64>>>,
    /// `m + 1` eigenvalues of each cycle Hessenberg matrix.
    pub spectra: Vec<Vec<C64>>,
    pub basis: Basis,
    /// Optional tail vector `c_hat` (length `n`).
    pub tail: Option<Vec<C64>>,
}

impl ScalarPrescription {
    pub fn n(&self) -> usize {
        self.m * self.cycles
    }

    /// Residual values `f_0..f_{m-1}` of cycle `k` followed by its transition
    /// (or terminal) value.
    pub fn cycle_values(&self, k: usize) -> Vec<f64> {
        let mut f = self.residuals[k].clone();
        f.push(self.transition(k));
        f
    }

    pub fn transition(&self, k: usize) -> f64 {
        if k + 1 < self.cycles {
            self.residuals[k + 1][0]
        } else {
            self.terminal.unwrap_or(self.residuals[k][self.m - 1] / 2.0)
        }
    }
}

/// Relative test for a prescribed flat step.
pub(crate) fn is_flat(prev: f64, cur: f64) -> bool {
    (prev - cur).abs() <= crate::krylov::STAGNATION_TOL * prev
}

/// A Ritz set contains zero (relative to its largest modulus).
pub(crate) fn contains_zero(set: &[C64]) -> bool {
    let scale = set.iter().map(|z| z.norm()).fold(1.0, f64::max);
    set.iter().any(|z| z.norm() <= 1e-12 * scale)
}

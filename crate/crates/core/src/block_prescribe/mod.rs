//! Block counterpart of the prescriber over `S = C^{p x p}`.

mod admissible;
mod factor;
mod restarted;
mod solvents;

pub use admissible::validate_block_admissible;
pub use factor::{build_block_cycle, build_block_du, BlockCycleFactor, BlockHessenbergFactor};
pub use restarted::{
    construct_restarted_block, detect_direction_stagnation, restarted_block_krylov_matrix,
    BlockRestartedConstruction, StagnationReport,
};
pub use solvents::{block_companion, solvents_to_coeffs, BlockRitz};

use crate::block::NormalizingQuantity;
use crate::linalg::{CMat, C64};
use crate::prescribe::Basis;

/// Restarted block GMRES with `cycles` cycles of `m` block steps, block size `p`.
#[derive(Clone, Debug)]
pub struct BlockPrescription {
    pub p: usize,
    pub m: usize,
    pub cycles: usize,
    /// `residuals[k]`: `F_0, ..., F_{M-1}` of cycle `k`.
    pub residuals: Vec<Vec<NormalizingQuantity>>,
    /// Closes the last cycle's factor; defaults to `F_{M-1} / 2`.
    pub terminal: Option<NormalizingQuantity>,
    /// `ritz[k][j-1]`: degree-`j` data of step `j` in cycle `k`, `j = 1..M`.
    pub ritz: Vec<Vec<BlockRitz>>,
    /// Degree `M + 1` data of each cycle's block companion.
    pub spectra: Vec<BlockRitz>,
    pub basis: Basis,
    /// Optional tail block vector `C_hat` (`n x p`).
    pub tail: Option<CMat>,
}

impl BlockPrescription {
    pub fn n(&self) -> usize {
        self.m * self.cycles * self.p
    }

    pub fn transition(&self, k: usize) -> NormalizingQuantity {
        if k + 1 < self.cycles {
            self.residuals[k + 1][0].clone()
        } else {
            self.terminal.clone().unwrap_or_else(|| {
                let half = self.residuals[k][self.m - 1].matrix() * C64::new(0.5, 0.0);
                NormalizingQuantity::new(half).expect("half of a normalizing quantity")
            })
        }
    }

    pub fn cycle_values(&self, k: usize) -> Vec<NormalizingQuantity> {
        let mut f = self.residuals[k].clone();
        f.push(self.transition(k));
        f
    }
}

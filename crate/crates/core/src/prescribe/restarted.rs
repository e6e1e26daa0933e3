use super::assembly::{krylov_rank, Assembly, KrylovRank};
use super::factor::build_cycle_hessenberg;
use super::{validate_admissible, CycleFactor, ScalarPrescription};
use crate::error::{Error, Result};
use crate::krylov::restarted_block_gmres;
use crate::linalg::{block, CMat, C64};

/// A system whose restarted GMRES run follows a [`ScalarPrescription`].
#[derive(Clone, Debug)]
pub struct RestartedConstruction {
    pub assembly: Assembly,
    pub factors: Vec<CycleFactor>,
}

impl RestartedConstruction {
    pub fn a(&self) -> &CMat {
        &self.assembly.a
    }

    pub fn b(&self) -> &CMat {
        &self.assembly.b
    }

    pub fn m(&self) -> usize {
        self.assembly.m
    }

    pub fn cycles(&self) -> usize {
        self.assembly.cycles
    }

    /// Applies the tail update `Ht(c) = Ht + c e_n^T`, `c = h^{(l)}_{m+1,m} c_hat`.
    pub fn tail_rank_one(&self, c_hat: &[C64]) -> Result<Self> {
        let c = CMat::from_column_slice(c_hat.len(), 1, c_hat);
        Ok(RestartedConstruction {
            assembly: self.assembly.with_tail(&c)?,
            factors: self.factors.clone(),
        })
    }

    pub fn eigenvalues_from_blocks(&self) -> Result<Vec<C64>> {
        self.assembly.eigenvalues_from_blocks()
    }
}

/// Builds one `(m+1) x (m+1)` factor per cycle and couples consecutive
/// cycles through the residual coefficients `g`.
pub fn construct_restarted(p: &ScalarPrescription) -> Result<RestartedConstruction> {
    let report = validate_admissible(p);
    if !report.is_ok() {
        return Err(Error::Inadmissible(report));
    }
    let m = p.m;
    let mut factors = Vec::with_capacity(p.cycles);
    for k in 0..p.cycles {
        let cf =
            build_cycle_hessenberg(&p.cycle_values(k), &p.ritz[k], &p.spectra[k]).map_err(|e| {
                match e {
                    Error::EndOfCycleStagnation { .. } => {
                        Error::EndOfCycleStagnation { cycle: k + 1 }
                    }
                    Error::Incompatible { step, reason } => Error::Incompatible {
                        step,
                        reason: format!("cycle {}: {reason}", k + 1),
                    },
                    other => other,
                }
            })?;
        factors.push(cf);
    }
    let underline: Vec<CMat> = factors
        .iter()
        .map(|cf| block(&cf.factor.h, 0, 0, m + 1, m))
        .collect();
    let mut ghat = Vec::with_capacity(p.cycles.saturating_sub(1));
    for (k, cf) in factors.iter().enumerate().take(p.cycles - 1) {
        let g = &cf.g / C64::new(cf.transition, 0.0);
        if g[m].norm() <= 1e-14 {
            return Err(Error::EndOfCycleStagnation { cycle: k + 1 });
        }
        ghat.push(CMat::from_column_slice(m + 1, 1, g.as_slice()));
    }
    let n = p.n();
    let q = p.basis.unitary(n)?;
    let start = CMat::from_element(1, 1, C64::new(p.residuals[0][0], 0.0));
    let mut assembly = Assembly::new(1, m, &underline, &ghat, &start, q)?;
    if let Some(tail) = &p.tail {
        assembly = assembly.with_tail(&CMat::from_column_slice(n, 1, tail))?;
    }
    Ok(RestartedConstruction { assembly, factors })
}

/// `[K^{(1)} ... K^{(l)}]` built from the cycle-start residuals of a
/// restarted (block) GMRES run on `(A, B)`, with its numerical rank.
///
/// Columns are normalized before the rank-revealing QR.
pub fn restarted_krylov_matrix(a: &CMat, b: &CMat, m: usize, cycles: usize) -> Result<KrylovRank> {
    let trace = restarted_block_gmres(a, b, m, cycles)?;
    Ok(krylov_rank(a, &trace))
}

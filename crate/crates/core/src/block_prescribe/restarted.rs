use super::factor::build_block_cycle;
use super::{validate_block_admissible, BlockCycleFactor, BlockPrescription};
use crate::error::{Error, Result};
use crate::krylov::{end_of_cycle_runs, stagnation_steps, EndRun, RunTrace, Stagnation};
use crate::linalg::{block, cond2, inverse, CMat};
use crate::prescribe::{Assembly, KrylovRank};

/// A block system whose restarted block GMRES run follows a [`BlockPrescription`].
#[derive(Clone, Debug)]
pub struct BlockRestartedConstruction {
    pub assembly: Assembly,
    pub factors: Vec<BlockCycleFactor>,
}

impl BlockRestartedConstruction {
    pub fn a(&self) -> &CMat {
        &self.assembly.a
    }

    pub fn b(&self) -> &CMat {
        &self.assembly.b
    }

    /// `Ht(C) = Ht + C E_N^T` with `C = C_hat H^{(l)}_{M+1,M}`.
    pub fn block_tail_rank_one(&self, c_hat: &CMat) -> Result<Self> {
        Ok(BlockRestartedConstruction {
            assembly: self.assembly.with_tail(c_hat)?,
            factors: self.factors.clone(),
        })
    }
}

pub fn construct_restarted_block(bp: &BlockPrescription) -> Result<BlockRestartedConstruction> {
    let report = validate_block_admissible(bp);
    if !report.is_ok() {
        return Err(Error::Inadmissible(report));
    }
    let (p, m) = (bp.p, bp.m);
    let mut factors = Vec::with_capacity(bp.cycles);
    for k in 0..bp.cycles {
        let cf = build_block_cycle(&bp.cycle_values(k), &bp.ritz[k], &bp.spectra[k]).map_err(
            |e| match e {
                Error::Incompatible { step, reason } => Error::Incompatible {
                    step,
                    reason: format!("cycle {}: {reason}", k + 1),
                },
                other => other,
            },
        )?;
        factors.push(cf);
    }
    let underline: Vec<CMat> = factors
        .iter()
        .map(|cf| block(&cf.factor.h, 0, 0, (m + 1) * p, m * p))
        .collect();
    let mut ghat = Vec::with_capacity(bp.cycles.saturating_sub(1));
    for (k, cf) in factors.iter().enumerate().take(bp.cycles - 1) {
        let g = &cf.g * inverse(cf.transition.matrix())?;
        let last = block(&g, m * p, 0, p, p);
        if last.norm() == 0.0 || cond2(&last) > 1e12 {
            return Err(Error::EndOfCycleStagnation { cycle: k + 1 });
        }
        ghat.push(g);
    }
    let q = bp.basis.unitary(bp.n())?;
    let mut assembly = Assembly::new(p, m, &underline, &ghat, bp.residuals[0][0].matrix(), q)?;
    if let Some(tail) = &bp.tail {
        assembly = assembly.with_tail(tail)?;
    }
    Ok(BlockRestartedConstruction { assembly, factors })
}

/// Flat steps of a block run and the flat runs ending each cycle.
#[derive(Clone, Debug)]
pub struct StagnationReport {
    pub steps: Vec<Stagnation>,
    pub end_runs: Vec<EndRun>,
}

pub fn detect_direction_stagnation(trace: &RunTrace) -> StagnationReport {
    StagnationReport {
        steps: stagnation_steps(trace),
        end_runs: end_of_cycle_runs(trace),
    }
}

pub fn restarted_block_krylov_matrix(
    a: &CMat,
    b: &CMat,
    m: usize,
    cycles: usize,
) -> Result<KrylovRank> {
    crate::prescribe::restarted_krylov_matrix(a, b, m, cycles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::NormalizingQuantity;
    use crate::krylov::restarted_block_gmres;
    use crate::linalg::{c64, C64};
    use crate::scenarios::random_block;

    #[test]
    fn two_by_two_blocks_three_cycles() {
        let bp = random_block(2, 2, 3, 41);
        let c = construct_restarted_block(&bp).unwrap();
        assert_eq!(c.a().shape(), (12, 12));
        let t = restarted_block_gmres(c.a(), c.b(), 2, 3).unwrap();
        for k in 0..3 {
            let want = bp.cycle_values(k);
            let got = &t.cycles[k].residuals;
            let steps = if k == 2 { 2 } else { 3 };
            for j in 0..steps {
                let d = (got[j].matrix() - want[j].matrix()).norm() / want[j].matrix().norm();
                assert!(d < 1e-9, "cycle {k} step {j}: {d:e}");
            }
        }
    }

    #[test]
    fn zero_block_tail_is_bitwise_identical() {
        let c = construct_restarted_block(&random_block(2, 2, 2, 5)).unwrap();
        let z = c.block_tail_rank_one(&CMat::zeros(8, 2)).unwrap();
        assert!(c
            .a()
            .iter()
            .zip(z.a().iter())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    }

    #[test]
    fn block_tail_keeps_earlier_values() {
        let bp = random_block(2, 2, 2, 6);
        let c = construct_restarted_block(&bp).unwrap();
        let tail = CMat::from_fn(8, 2, |i, j| c64(0.1 * i as f64, -0.05 * j as f64));
        let tc = c.block_tail_rank_one(&tail).unwrap();
        let t = restarted_block_gmres(tc.a(), tc.b(), 2, 2).unwrap();
        let first = &t.cycles[0].residuals;
        for (j, f) in bp.cycle_values(0).iter().enumerate() {
            assert!((first[j].matrix() - f.matrix()).norm() < 1e-9 * f.matrix().norm());
        }
        assert!((t.cycles[1].residuals[1].matrix() - bp.residuals[1][1].matrix()).norm() < 1e-9);
    }

    #[test]
    fn loewner_increase_is_refused() {
        let mut bp = random_block(2, 2, 2, 7);
        let grown = bp.residuals[0][0].matrix() * C64::new(1.5, 0.0);
        bp.residuals[0][1] = NormalizingQuantity::new(grown).unwrap();
        assert!(matches!(
            construct_restarted_block(&bp),
            Err(Error::Inadmissible(_))
        ));
    }
}

use super::{block_companion, BlockRitz};
use crate::block::NormalizingQuantity;
use crate::error::{Error, Result};
use crate::linalg::{
    block, cond2, hermitian_eig, identity, inverse, norm2, principal_sqrt_psd, qr, set_block,
    unit_upper_inverse, CMat, C64,
};

/// `H = D U C (D U)^{-1}` over `p x p` blocks.
#[derive(Clone, Debug)]
pub struct BlockHessenbergFactor {
    pub p: usize,
    /// Diagonal blocks of `D`, each upper triangular with positive diagonal.
    pub d: Vec<CMat>,
    pub u_inv: CMat,
    pub u: CMat,
    pub c: CMat,
    pub h: CMat,
    pub cond_du: f64,
}

impl BlockHessenbergFactor {
    pub fn du(&self) -> CMat {
        block_diagonal(&self.d) * &self.u
    }

    pub fn reconstruction_residual(&self) -> f64 {
        let du = self.du();
        (&self.h * &du - &du * &self.c).norm() / (self.h.norm() * du.norm()).max(f64::MIN_POSITIVE)
    }

    /// Block `(0, k)` of `(DU)^{-1}`: `X_k = (U^{-1})_{1,k} D_k^{-1}`.
    pub fn first_row_block(&self, k: usize) -> Result<CMat> {
        let p = self.p;
        Ok(block(&self.u_inv, 0, k * p, p, p) * inverse(&self.d[k])?)
    }
}

#[derive(Clone, Debug)]
pub struct BlockCycleFactor {
    pub factor: BlockHessenbergFactor,
    /// `G_i = X_i^* F^* F` for the transition value `F`, `(M+1)p x p`.
    pub g: CMat,
    pub transition: NormalizingQuantity,
}

fn block_diagonal(d: &[CMat]) -> CMat {
    let p = d[0].nrows();
    let mut out = CMat::zeros(d.len() * p, d.len() * p);
    for (k, dk) in d.iter().enumerate() {
        set_block(&mut out, k * p, k * p, dk);
    }
    out
}

/// Block unit upper triangular `U^{-1}` whose block column `j` holds
/// `-C_0^{(j)}, ..., -C_{j-1}^{(j)}` above the identity.
fn build_block_u_inv(p: usize, ritz: &[Vec<CMat>]) -> CMat {
    let s = ritz.len() + 1;
    let mut u = identity(s * p);
    for (i, coeffs) in ritz.iter().enumerate() {
        let j = i + 1;
        for (row, c) in coeffs.iter().enumerate() {
            set_block(&mut u, row * p, j * p, &(-c));
        }
    }
    u
}

/// Diagonal blocks of `D` from the normalizing quantities and the first
/// block row of `U^{-1}`.
///
/// `D_1 = F_0`; for later blocks, `T_k = sqrt(Gamma_k^{-1} - Gamma_{k-1}^{-1})`
/// with `Gamma = F^* F`, and `D_k` is the triangular factor of the QR
/// decomposition of `T_k^{-1} (U^{-1})_{1,k}`. A totally stagnating step
/// with a vanishing coefficient block gets `D_k = I`.
pub fn build_block_du(f: &[NormalizingQuantity], u_inv: &CMat) -> Result<Vec<CMat>> {
    let p = f[0].p();
    let s = f.len();
    if u_inv.nrows() != s * p {
        return Err(Error::Dimension(format!(
            "{s} blocks for U^-1 of size {}",
            u_inv.nrows()
        )));
    }
    let row_scale = block(u_inv, 0, 0, p, s * p).norm().max(1.0);
    let mut d = Vec::with_capacity(s);
    d.push(f[0].matrix().clone());
    for k in 1..s {
        let gi_cur = inverse(&f[k].gram())?;
        let gi_prev = inverse(&f[k - 1].gram())?;
        let diff = &gi_cur - &gi_prev;
        let diff = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
        let scale = norm2(&gi_cur);
        let (vals, _) = hermitian_eig(&diff);
        if vals[0] < -1e-10 * scale {
            return Err(Error::Incompatible {
                step: k,
                reason: "normalizing quantities increase in the Loewner order".into(),
            });
        }
        let total = vals[p - 1] <= 1e-10 * scale;
        let singular = vals[0] <= 1e-10 * scale;
        let y = block(u_inv, 0, k * p, p, p);
        let y_zero = y.norm() <= 1e-14 * row_scale;
        let y_singular = y_zero || cond2(&y) > 1e12;
        match (singular, y_singular) {
            (false, false) => {
                let t = principal_sqrt_psd(&diff)?;
                let z = inverse(&t)? * &y;
                d.push(qr(&z).r);
            }
            (true, true) if total && y_zero => d.push(identity(p)),
            (true, true) => {
                return Err(Error::Incompatible {
                    step: k,
                    reason: "stagnation in a single direction cannot be constructed".into(),
                })
            }
            (true, false) => {
                return Err(Error::Incompatible {
                    step: k,
                    reason: "stagnation with a nonsingular constant coefficient".into(),
                })
            }
            (false, true) => {
                return Err(Error::Incompatible {
                    step: k,
                    reason: "singular constant coefficient without stagnation".into(),
                })
            }
        }
    }
    Ok(d)
}

/// One block cycle of `M` steps: `f` holds `F_0..F_{M-1}` and the transition,
/// `ritz` the `M` step data and `spectrum` the degree `M + 1` data.
pub fn build_block_cycle(
    f: &[NormalizingQuantity],
    ritz: &[BlockRitz],
    spectrum: &BlockRitz,
) -> Result<BlockCycleFactor> {
    let s = f.len();
    let p = f[0].p();
    if ritz.len() + 1 != s || spectrum.degree() != s {
        return Err(Error::Dimension(format!(
            "{s} normalizing quantities need {} Ritz steps and degree {s} spectral data",
            s - 1
        )));
    }
    let coeffs = ritz
        .iter()
        .map(BlockRitz::coefficients)
        .collect::<Result<Vec<_>>>()?;
    let u_inv = build_block_u_inv(p, &coeffs);
    let d = build_block_du(f, &u_inv)?;
    let u = unit_upper_inverse(&u_inv);
    let c = block_companion(&spectrum.coefficients()?);
    let core = &u * &c * &u_inv;
    let d_inv = d.iter().map(inverse).collect::<Result<Vec<_>>>()?;
    let mut h = block_diagonal(&d) * core * block_diagonal(&d_inv);
    for bj in 0..s {
        for bi in bj + 1..s {
            let blk = if bi == bj + 1 {
                let mut sub = &d[bi] * &d_inv[bj];
                for r in 0..p {
                    for col in 0..r {
                        sub[(r, col)] = C64::new(0.0, 0.0);
                    }
                    sub[(r, r)] = C64::new(sub[(r, r)].re, 0.0);
                }
                sub
            } else {
                CMat::zeros(p, p)
            };
            set_block(&mut h, bi * p, bj * p, &blk);
        }
    }
    let cond_du = cond2(&(block_diagonal(&d) * &u));
    let factor = BlockHessenbergFactor {
        p,
        d,
        u_inv,
        u,
        c,
        h,
        cond_du,
    };
    let transition = f[s - 1].clone();
    let gamma = transition.gram();
    let mut g = CMat::zeros(s * p, p);
    for i in 0..s {
        set_block(
            &mut g,
            i * p,
            0,
            &(factor.first_row_block(i)?.adjoint() * &gamma),
        );
    }
    Ok(BlockCycleFactor {
        factor,
        g,
        transition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::blnorm;
    use crate::krylov::block_gmres_run;
    use crate::linalg::{diag_real, real};

    fn nq(m: CMat) -> NormalizingQuantity {
        NormalizingQuantity::new(m).unwrap()
    }

    #[test]
    fn diagonal_second_block() {
        let u_inv = build_block_u_inv(2, &[vec![identity(2) * real(-3.0)]]);
        let f = [
            NormalizingQuantity::identity(2),
            nq(identity(2) * real(0.5)),
        ];
        let d = build_block_du(&f, &u_inv).unwrap();
        assert!((&d[1] - identity(2) * real(3f64.sqrt())).norm() < 1e-14);
    }

    #[test]
    fn one_step_block_cycle_reproduces_prescription() {
        let f = [
            NormalizingQuantity::identity(2),
            nq(diag_real(&[0.5, 0.25])),
        ];
        let s1 = CMat::from_row_slice(2, 2, &[real(2.0), real(0.3), real(0.0), real(-1.0)]);
        let ritz = [BlockRitz::Solvents(vec![s1])];
        let spec = BlockRitz::Solvents(vec![diag_real(&[1.0, 2.0]), diag_real(&[3.0, -2.0])]);
        let cf = build_block_cycle(&f, &ritz, &spec).unwrap();
        assert!(cf.factor.reconstruction_residual() < 1e-14);
        let mut e = CMat::zeros(4, 2);
        set_block(&mut e, 0, 0, &identity(2));
        let t = block_gmres_run(&cf.factor.h, &e, 1).unwrap();
        let c = &t.cycles[0];
        assert!((c.residuals[1].matrix() - f[1].matrix()).norm() < 1e-12);
        assert!((blnorm(&cf.g).matrix() - f[1].matrix()).norm() < 1e-12);
        assert!((&c.r_end - &cf.g).norm() < 1e-12);
    }
}

use super::{contains_zero, is_flat};
use crate::error::{Error, Result};
use crate::linalg::{
    companion, cond2, diag_real, poly_from_roots, unit_upper_inverse, CMat, CVec, C64,
};

/// `H = D U C (D U)^{-1}` together with its factors.
#[derive(Clone, Debug)]
pub struct HessenbergFactor {
    /// Positive diagonal of `D`.
    pub d: Vec<f64>,
    pub u_inv: CMat,
    pub u: CMat,
    pub c: CMat,
    pub h: CMat,
    pub cond_du: f64,
}

impl HessenbergFactor {
    pub fn du(&self) -> CMat {
        diag_real(&self.d) * &self.u
    }

    /// `||H (DU) - (DU) C|| / (||H|| ||DU||)`
    pub fn reconstruction_residual(&self) -> f64 {
        let du = self.du();
        (&self.h * &du - &du * &self.c).norm() / (self.h.norm() * du.norm()).max(f64::MIN_POSITIVE)
    }
}

/// A cycle factor of size `m + 1` and the coefficients `g` of the cycle's
/// final residual in the basis `[V, w]`.
#[derive(Clone, Debug)]
pub struct CycleFactor {
    pub factor: HessenbergFactor,
    pub g: CVec,
    /// Residual value after the last step of the cycle.
    pub transition: f64,
}

/// Unit upper triangular matrix whose column `j` carries the monic
/// coefficients of `prod (z - theta)` over the Ritz values of step `j`.
///
/// `ritz[j-1]` must hold exactly `j` values.
pub fn build_u_inv(ritz: &[Vec<C64>]) -> Result<CMat> {
    let s = ritz.len() + 1;
    let mut u = CMat::identity(s, s);
    for (i, theta) in ritz.iter().enumerate() {
        let j = i + 1;
        if theta.len() != j {
            return Err(Error::Dimension(format!(
                "step {j} needs {j} Ritz values, got {}",
                theta.len()
            )));
        }
        for (row, a) in poly_from_roots(theta).monic().into_iter().enumerate() {
            u[(row, j)] = a;
        }
    }
    Ok(u)
}

/// Positive diagonal of `D` from the residual values and the first row of `U^{-1}`.
///
/// `d_1 = f_0` and `d_i = |(U^{-1})_{1,i}| / sqrt(f_{i-1}^{-2} - f_{i-2}^{-2})`;
/// at a flat step whose Ritz values contain zero, `d_i = 1`.
pub fn build_d(f: &[f64], u_inv: &CMat) -> Result<Vec<f64>> {
    let s = f.len();
    if u_inv.nrows() != s {
        return Err(Error::Dimension(format!(
            "{} residual values for U^-1 of size {}",
            s,
            u_inv.nrows()
        )));
    }
    let scale = u_inv.row(0).iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut d = Vec::with_capacity(s);
    d.push(f[0]);
    for i in 1..s {
        let num = u_inv[(0, i)].norm();
        let flat = is_flat(f[i - 1], f[i]);
        let zero = num <= 1e-14 * scale;
        match (flat, zero) {
            (true, true) => d.push(1.0),
            (false, false) => {
                let den = (f[i].powi(-2) - f[i - 1].powi(-2)).sqrt();
                if !(den > 0.0) {
                    return Err(Error::Incompatible {
                        step: i,
                        reason: format!("residual increases ({} > {})", f[i], f[i - 1]),
                    });
                }
                d.push(num / den);
            }
            (true, false) => {
                return Err(Error::Incompatible {
                    step: i,
                    reason: "flat step without a zero Ritz value".into(),
                })
            }
            (false, true) => {
                return Err(Error::Incompatible {
                    step: i,
                    reason: "zero Ritz value without a flat step".into(),
                })
            }
        }
    }
    Ok(d)
}

/// Builds `H = D U C (D U)^{-1}` of size `s = f.len()`: `s - 1` Ritz sets and
/// `s` eigenvalues for `C`.
pub(crate) fn build_factor(
    f: &[f64],
    ritz: &[Vec<C64>],
    spectrum: &[C64],
) -> Result<HessenbergFactor> {
    let s = f.len();
    if ritz.len() + 1 != s || spectrum.len() != s {
        return Err(Error::Dimension(format!(
            "{} residual values need {} Ritz sets and {} eigenvalues (got {} and {})",
            s,
            s - 1,
            s,
            ritz.len(),
            spectrum.len()
        )));
    }
    let u_inv = build_u_inv(ritz)?;
    let d = build_d(f, &u_inv)?;
    let u = unit_upper_inverse(&u_inv);
    let c = companion(&poly_from_roots(spectrum));
    let core = &u * &c * &u_inv;
    let mut h = CMat::from_fn(s, s, |i, j| core[(i, j)] * (d[i] / d[j]));
    for j in 0..s {
        for i in j + 1..s {
            h[(i, j)] = if i == j + 1 {
                C64::new(d[i] / d[j], 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
        }
    }
    let cond_du = cond2(&(diag_real(&d) * &u));
    Ok(HessenbergFactor {
        d,
        u_inv,
        u,
        c,
        h,
        cond_du,
    })
}

/// One restart cycle: `f` holds `f_0..f_{m-1}` and the transition value,
/// `ritz` the `m` Ritz sets, `spectrum` the `m + 1` eigenvalues of the
/// cycle matrix.
///
/// The residual coefficients are `g = conj(e_1^T (DU)^{-1}) f_m^2`.
pub fn build_cycle_hessenberg(
    f: &[f64],
    ritz: &[Vec<C64>],
    spectrum: &[C64],
) -> Result<CycleFactor> {
    let factor = build_factor(f, ritz, spectrum)?;
    let s = f.len();
    let fm = f[s - 1];
    let g = CVec::from_fn(s, |i, _| {
        (factor.u_inv[(0, i)] / factor.d[i]).conj() * (fm * fm)
    });
    if let Some(last) = ritz.last() {
        if contains_zero(last) {
            return Err(Error::EndOfCycleStagnation { cycle: 0 });
        }
    }
    Ok(CycleFactor {
        factor,
        g,
        transition: fm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::gmres_run;
    use crate::linalg::{eig, multiset_distance, real, unit_column};

    #[test]
    fn u_inv_columns() {
        let u = build_u_inv(&[vec![real(3.0)], vec![real(1.0), real(2.0)]]).unwrap();
        assert_eq!(u[(0, 1)], real(-3.0));
        assert_eq!(u[(0, 2)], real(2.0));
        assert_eq!(u[(1, 2)], real(-3.0));
        let zero = build_u_inv(&[vec![real(0.0)], vec![real(0.0), real(0.0)]]).unwrap();
        assert_eq!(zero, CMat::identity(3, 3));
    }

    #[test]
    fn d_examples() {
        let u = build_u_inv(&[vec![real(3.0)]]).unwrap();
        let d = build_d(&[1.0, 0.5], &u).unwrap();
        assert!((d[1] - 3f64.sqrt()).abs() < 1e-15);
        let u = build_u_inv(&[vec![real(1.0)]]).unwrap();
        let d = build_d(&[2.0, 1.0], &u).unwrap();
        assert_eq!(d[0], 2.0);
        assert!((d[1] - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        let u = build_u_inv(&[vec![real(0.0)], vec![real(0.0), real(0.0)]]).unwrap();
        assert_eq!(build_d(&[0.7, 0.7, 0.7], &u).unwrap(), vec![0.7, 1.0, 1.0]);
    }

    #[test]
    fn d_rejects_mismatched_stagnation() {
        let u = build_u_inv(&[vec![real(1.0)]]).unwrap();
        assert!(matches!(
            build_d(&[1.0, 1.0], &u),
            Err(Error::Incompatible { step: 1, .. })
        ));
        let u = build_u_inv(&[vec![real(0.0)]]).unwrap();
        assert!(matches!(
            build_d(&[1.0, 0.5], &u),
            Err(Error::Incompatible { step: 1, .. })
        ));
    }

    #[test]
    fn two_by_two_cycle() {
        let cf = build_cycle_hessenberg(&[1.0, 0.5], &[vec![real(3.0)]], &[real(1.0), real(2.0)])
            .unwrap();
        let h = &cf.factor.h;
        let expected = CMat::from_row_slice(
            2,
            2,
            &[
                real(3.0),
                real(-2.0 / 3f64.sqrt()),
                real(3f64.sqrt()),
                real(0.0),
            ],
        );
        assert!((h - expected).norm() < 1e-14);
        assert!(multiset_distance(&eig(h).unwrap(), &[real(1.0), real(2.0)]) < 1e-12);
        let t = gmres_run(h, &unit_column(2, 0), 1).unwrap();
        let norms = &t.residual_norms()[0];
        assert!((norms[1] - 0.5).abs() < 1e-14);
        assert!((cf.g.norm() - 0.5).abs() < 1e-14);
        assert!((&t.cycles[0].r_end.column(0) - &cf.g).norm() < 1e-14);
        assert!(cf.factor.reconstruction_residual() < 1e-14);
    }

    #[test]
    fn repeated_unit_spectrum() {
        let cf = build_cycle_hessenberg(&[1.0, 0.3], &[vec![real(0.5)]], &[real(1.0), real(1.0)])
            .unwrap();
        assert!(multiset_distance(&eig(&cf.factor.h).unwrap(), &[real(1.0), real(1.0)]) < 1e-8);
    }
}

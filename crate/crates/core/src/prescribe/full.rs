use super::factor::build_factor;
use super::{validate_full, FullPrescription, HessenbergFactor};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// `A = V H V^*`, `b = f_0 V e_1` with `H = D U C (D U)^{-1}`.
#[derive(Clone, Debug)]
pub struct FullConstruction {
    pub a: CMat,
    pub b: CMat,
    /// Orthonormal basis; the Arnoldi basis of `(A, b)`.
    pub v: CMat,
    pub factor: HessenbergFactor,
}

pub fn construct_full_gmres(p: &FullPrescription) -> Result<FullConstruction> {
    let report = validate_full(p);
    if !report.is_ok() {
        return Err(Error::Inadmissible(report));
    }
    let n = p.n();
    let factor = build_factor(&p.residuals, &p.ritz, &p.eigenvalues)?;
    let v = p.basis.unitary(n)?;
    let a = &v * &factor.h * v.adjoint();
    let b = v.column(0).into_owned() * C64::new(p.residuals[0], 0.0);
    Ok(FullConstruction {
        a,
        b: CMat::from_column_slice(n, 1, b.as_slice()),
        v,
        factor,
    })
}

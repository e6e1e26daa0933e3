use nalgebra::SymmetricEigen;

use super::{CMat, CVec, C64};
use crate::error::{Error, Result};

/// Eigendecomposition of the Hermitian part of `s`; eigenvalues ascending,
/// eigenvectors as matching columns.
pub fn hermitian_eig(s: &CMat) -> (Vec<f64>, CMat) {
    let n = s.nrows();
    let herm = (s + s.adjoint()) * C64::new(0.5, 0.0);
    let se = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &se.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Inputs that are not Hermitian, or have an eigenvalue below
/// `-1e-10 * ||S||`, are rejected; tiny negative eigenvalues are clamped.
pub fn principal_sqrt_psd(s: &CMat) -> Result<CMat> {
    let n = s.nrows();
    if n != s.ncols() {
        return Err(Error::Dimension(format!(
            "sqrt of {}x{} matrix",
            n,
            s.ncols()
        )));
    }
    let scale = s.norm();
    if scale == 0.0 {
        return Ok(CMat::zeros(n, n));
    }
    let tol = 1e-10 * scale;
    let skew = (s - s.adjoint()).norm();
    if skew > tol {
        return Err(Error::Indefinite {
            min_eig: f64::NAN,
            tol,
        });
    }
    let (vals, vecs) = hermitian_eig(s);
    if let Some(&min) = vals.first() {
        if min < -tol {
            return Err(Error::Indefinite { min_eig: min, tol });
        }
    }
    let roots = CVec::from_iterator(n, vals.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0)));
    let t = &vecs * CMat::from_diagonal(&roots) * vecs.adjoint();
    Ok((&t + t.adjoint()) * C64::new(0.5, 0.0))
}

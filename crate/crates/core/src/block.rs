//! The algebra `S = C^{p x p}` acting as scalars on block vectors.
//!
//! Block vectors are plain `n x p` matrices; the block inner product of
//! `V` and `W` is `W^* V`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, norm2, qr, CMat, CVec, C64};

/// Upper triangular `p x p` matrix with real non-negative diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizingQuantity(CMat);

impl NormalizingQuantity {
    /// Validates shape and diagonal; entries below the diagonal are zeroed.
    pub fn new(mut r: CMat) -> Result<Self> {
        let p = r.nrows();
        if p != r.ncols() || p == 0 {
            return Err(Error::InvalidNormalizingQuantity(format!(
                "shape {}x{}",
                p,
                r.ncols()
            )));
        }
        for i in 0..p {
            let d = r[(i, i)];
            if !(d.re >= 0.0) || d.im != 0.0 || !d.re.is_finite() {
                return Err(Error::InvalidNormalizingQuantity(format!(
                    "diagonal entry {i} is {d}"
                )));
            }
            for j in 0..i {
                r[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidNormalizingQuantity("non-finite entry".into()));
        }
        Ok(NormalizingQuantity(r))
    }

    /// Wraps the `R` factor of [`qr`], which already satisfies the invariants.
    pub(crate) fn from_qr_factor(r: CMat) -> Self {
        NormalizingQuantity(r)
    }

    pub fn scalar(v: f64) -> Result<Self> {
        Self::new(CMat::from_element(1, 1, C64::new(v, 0.0)))
    }

    pub fn identity(p: usize) -> Self {
        NormalizingQuantity(CMat::identity(p, p))
    }

    pub fn p(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    /// `R^* R`
    pub fn gram(&self) -> CMat {
        self.0.adjoint() * &self.0
    }

    /// Member of `S+`: every diagonal entry above `tol`.
    pub fn is_positive(&self, tol: f64) -> bool {
        (0..self.p()).all(|i| self.0[(i, i)].re > tol)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }
}

/// Economy QR `Z = V R` of a block vector of full column rank.
pub fn blk_normalize(z: &CMat) -> Result<(CMat, NormalizingQuantity)> {
    let p = z.ncols();
    if z.nrows() < p || p == 0 {
        return Err(Error::Dimension(format!(
            "block vector {}x{}",
            z.nrows(),
            p
        )));
    }
    let sv = z.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-12 * smax).count();
    if smax == 0.0 || rank < p {
        return Err(Error::BlockBreakdown { step: 0, rank, p });
    }
    let f = qr(z);
    Ok((f.q, NormalizingQuantity(f.r)))
}

/// Normalizing quantity of a possibly rank-deficient block vector.
pub fn blnorm(z: &CMat) -> NormalizingQuantity {
    NormalizingQuantity(qr(z).r)
}

/// `<V, W> = W^* V`
pub fn blk_inner(v: &CMat, w: &CMat) -> Result<CMat> {
    if v.shape() != w.shape() {
        return Err(Error::Dimension(format!(
            "block inner product of {:?} and {:?}",
            v.shape(),
            w.shape()
        )));
    }
    Ok(w.adjoint() * v)
}

/// `|S|`: the upper Cholesky factor of `S^* S`, taken from the QR of `S`
/// so that singular `S` yields zero diagonal entries instead of failing.
pub fn blk_abs(s: &CMat) -> NormalizingQuantity {
    assert_eq!(s.nrows(), s.ncols(), "blk_abs requires a square matrix");
    NormalizingQuantity(qr(s).r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loewner {
    Less,
    LessOrEqual,
    Equal,
    GreaterOrEqual,
    Greater,
    Incomparable,
}

impl std::fmt::Display for Loewner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Loewner::Less => "less",
            Loewner::LessOrEqual => "less-or-equal",
            Loewner::Equal => "equal",
            Loewner::GreaterOrEqual => "greater-or-equal",
            Loewner::Greater => "greater",
            Loewner::Incomparable => "incomparable",
        })
    }
}

/// Compares `R1^* R1` with `R2^* R2` in the Loewner order.
pub fn loewner_cmp(r1: &NormalizingQuantity, r2: &NormalizingQuantity) -> Loewner {
    assert_eq!(r1.p(), r2.p(), "loewner_cmp block size mismatch");
    let tol = 1e-10 * norm2(r1.matrix()).powi(2).max(norm2(r2.matrix()).powi(2));
    let (vals, _) = hermitian_eig(&(r2.gram() - r1.gram()));
    let min = vals[0];
    let max = vals[vals.len() - 1];
    if min.abs() <= tol && max.abs() <= tol {
        Loewner::Equal
    } else if min > tol {
        Loewner::Less
    } else if min >= -tol {
        Loewner::LessOrEqual
    } else if max < -tol {
        Loewner::Greater
    } else if max <= tol {
        Loewner::GreaterOrEqual
    } else {
        Loewner::Incomparable
    }
}

/// A unit vector `u` with `u^*(F^*F - G^*G)u = 0`, if one exists.
///
/// When the difference is indefinite, bisects along the path between the
/// eigenvectors of its extreme eigenvalues. Returns `None` for a definite
/// difference.
pub fn equal_direction(f: &NormalizingQuantity, g: &NormalizingQuantity) -> Option<CVec> {
    assert_eq!(f.p(), g.p(), "equal_direction block size mismatch");
    let p = f.p();
    let diff = f.gram() - g.gram();
    let scale = diff.norm();
    if scale == 0.0 {
        let mut u = CVec::zeros(p);
        u[0] = C64::new(1.0, 0.0);
        return Some(u);
    }
    let tol = 1e-10 * scale;
    let (vals, vecs) = hermitian_eig(&diff);
    let (lo, hi) = (vals[0], vals[p - 1]);
    let u_lo = vecs.column(0).into_owned();
    let u_hi = vecs.column(p - 1).into_owned();
    if lo.abs() <= tol {
        return Some(u_lo);
    }
    if hi.abs() <= tol {
        return Some(u_hi);
    }
    if lo > 0.0 || hi < 0.0 {
        return None;
    }
    let quad = |t: f64| {
        let v = &u_lo * C64::new(1.0 - t, 0.0) + &u_hi * C64::new(t, 0.0);
        let v = &v / C64::new(v.norm(), 0.0);
        let q = (v.adjoint() * &diff * &v)[(0, 0)].re;
        (q, v)
    };
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut best = quad(0.5);
    while b - a > 1e-12 {
        let mid = 0.5 * (a + b);
        best = quad(mid);
        if best.0 == 0.0 {
            break;
        }
        if best.0 < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(best.1)
}

/// `|u^* M u|` for a unit vector `u`.
pub fn quadratic_form(m: &CMat, u: &CVec) -> f64 {
    (u.adjoint() * m * u)[(0, 0)].norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, diag_real, identity, random_unitary, real, rng_from_seed};
    use rand_distr::{Distribution, StandardNormal};

    fn random(nr: usize, nc: usize, seed: u64) -> CMat {
        let mut rng = rng_from_seed(seed);
        CMat::from_fn(nr, nc, |_, _| {
            c64(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
    }

    fn nq(d: &[f64]) -> NormalizingQuantity {
        NormalizingQuantity::new(diag_real(d)).unwrap()
    }

    #[test]
    fn normalizing_orthonormal_block_is_identity() {
        let v0 = random_unitary(6, 1).columns(0, 2).into_owned();
        let (v, r) = blk_normalize(&v0).unwrap();
        assert!((v - &v0).norm() < 1e-12);
        assert!((r.matrix() - identity(2)).norm() < 1e-12);
    }

    #[test]
    fn normalizing_scaled_columns() {
        let v0 = random_unitary(6, 2).columns(0, 2).into_owned();
        let z = &v0 * diag_real(&[2.0, 3.0]);
        let (_, r) = blk_normalize(&z).unwrap();
        assert!((r.matrix() - diag_real(&[2.0, 3.0])).norm() < 1e-12);
        assert!((blk_inner(&z, &z).unwrap() - diag_real(&[4.0, 9.0])).norm() < 1e-12);
    }

    #[test]
    fn normalizing_random_block() {
        let z = random(8, 3, 5);
        let (v, r) = blk_normalize(&z).unwrap();
        assert!((&v * r.matrix() - &z).norm() <= 1e-12 * z.norm());
        assert!((blk_inner(&z, &z).unwrap() - r.gram()).norm() <= 1e-12 * z.norm_squared());
    }

    #[test]
    fn normalizing_rank_deficient_block_fails() {
        let mut z = random(5, 2, 3);
        let c = z.column(0).into_owned();
        z.set_column(1, &c);
        assert!(matches!(
            blk_normalize(&z),
            Err(Error::BlockBreakdown { rank: 1, p: 2, .. })
        ));
    }

    #[test]
    fn inner_product_conjugate_symmetry() {
        let v = random(6, 2, 8);
        let w = random(6, 2, 9);
        let a = blk_inner(&v, &w).unwrap().adjoint();
        let b = blk_inner(&w, &v).unwrap();
        assert!((a - b).norm() < 1e-14);
        assert!(blk_inner(&v, &random(5, 2, 1)).is_err());
    }

    #[test]
    fn absolute_value_examples() {
        assert!((blk_abs(&identity(2)).matrix() - identity(2)).norm() < 1e-15);
        let s = CMat::from_row_slice(2, 2, &[real(0.0), real(2.0), real(1.0), real(0.0)]);
        assert!((blk_abs(&s).matrix() - diag_real(&[1.0, 2.0])).norm() < 1e-14);
    }

    #[test]
    fn absolute_value_left_unitary_invariance() {
        let s = random(3, 3, 12);
        let q = random_unitary(3, 13);
        let a = blk_abs(&s);
        let b = blk_abs(&(q * &s));
        assert!((a.matrix() - b.matrix()).norm() <= 1e-10 * s.norm());
        assert!((a.gram() - s.adjoint() * &s).norm() <= 1e-10 * s.norm_squared());
    }

    #[test]
    fn loewner_examples() {
        assert_eq!(
            loewner_cmp(&nq(&[1.0, 1.0]), &nq(&[2.0, 3.0])),
            Loewner::Less
        );
        assert_eq!(
            loewner_cmp(&nq(&[2.0, 3.0]), &nq(&[1.0, 1.0])),
            Loewner::Greater
        );
        assert_eq!(
            loewner_cmp(&nq(&[2.0, 3.0]), &nq(&[2.0, 3.0])),
            Loewner::Equal
        );
        assert_eq!(
            loewner_cmp(&nq(&[2.0, 1.0]), &nq(&[1.0, 2.0])),
            Loewner::Incomparable
        );
        assert_eq!(
            loewner_cmp(&nq(&[1.0, 2.0]), &nq(&[1.0, 3.0])),
            Loewner::LessOrEqual
        );
        assert_eq!(
            loewner_cmp(&nq(&[1.0, 3.0]), &nq(&[1.0, 2.0])),
            Loewner::GreaterOrEqual
        );
    }

    #[test]
    fn equal_direction_examples() {
        assert!(equal_direction(&nq(&[1.0, 1.0]), &nq(&[2.0, 2.0])).is_none());
        let u = equal_direction(&nq(&[1.0, 2.0]), &nq(&[2.0, 1.0])).unwrap();
        let expected = 1.0 / 2f64.sqrt();
        assert!((u[0].norm() - expected).abs() < 1e-10);
        assert!((u[1].norm() - expected).abs() < 1e-10);
        let f = nq(&[1.5, 0.5]);
        let u = equal_direction(&f, &f).unwrap();
        assert_eq!(quadratic_form(&(f.gram() - f.gram()), &u), 0.0);
    }

    #[test]
    fn rejects_malformed_normalizing_quantity() {
        assert!(NormalizingQuantity::new(diag_real(&[1.0, -1.0])).is_err());
        let mut m = identity(2);
        m[(0, 0)] = c64(1.0, 1.0);
        assert!(NormalizingQuantity::new(m).is_err());
        let mut low = identity(2);
        low[(1, 0)] = real(5.0);
        assert_eq!(
            NormalizingQuantity::new(low).unwrap().matrix()[(1, 0)],
            real(0.0)
        );
    }
}

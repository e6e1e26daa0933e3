//! Dense complex kernels shared by the solvers and the constructions.
//!
//! Matrices are `nalgebra` column-major dense matrices over `Complex64`.
//! QR, the nonsymmetric eigensolver and the companion utilities are
//! implemented here; Hermitian eigendecompositions, LU and SVD are taken
//! from `nalgebra`.

mod eig;
mod hermitian;
mod poly;
mod qr;
mod random;

pub use eig::{eig, hessenberg, EIG_MAX_DIM};
pub use hermitian::{hermitian_eig, principal_sqrt_psd};
pub use poly::{companion, poly_from_roots, PolyCoeffs};
pub use qr::{qr, Qr};
pub use random::{random_unitary, rng_from_seed};

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn diag_real(values: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(
        values.len(),
        values.iter().map(|&v| real(v)),
    ))
}

pub fn diag(values: &[C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(values))
}

/// Canonical basis vector `e_i` of length `n` as an `n x 1` matrix.
pub fn unit_column(n: usize, i: usize) -> CMat {
    let mut e = CMat::zeros(n, 1);
    e[(i, 0)] = real(1.0);
    e
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Spectral norm via the largest singular value.
pub fn norm2(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// 2-norm condition number; `inf` for singular input.
pub fn cond2(m: &CMat) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `||Q^* Q - I||_F`
pub fn orthonormality_residual(q: &CMat) -> f64 {
    (q.adjoint() * q - identity(q.ncols())).norm()
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "inverse of {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    m.clone().try_inverse().filter(is_finite).ok_or_else(|| {
        Error::Singular(format!("{}x{} matrix has no inverse", m.nrows(), m.ncols()))
    })
}

/// Solves `m x = rhs` by LU with partial pivoting.
pub fn solve(m: &CMat, rhs: &CMat) -> Result<CMat> {
    m.clone()
        .lu()
        .solve(rhs)
        .filter(is_finite)
        .ok_or_else(|| Error::Singular("linear solve".into()))
}

/// Inverse of a unit upper triangular matrix by back substitution.
pub fn unit_upper_inverse(u: &CMat) -> CMat {
    let n = u.nrows();
    let mut inv = identity(n);
    for col in 0..n {
        for row in (0..col).rev() {
            let mut s = C64::new(0.0, 0.0);
            for k in row + 1..=col {
                s += u[(row, k)] * inv[(k, col)];
            }
            inv[(row, col)] = -s;
        }
    }
    inv
}

/// Least-squares solution of `min ||m y - rhs||_F` for `m` of full column rank.
pub fn least_squares(m: &CMat, rhs: &CMat) -> Result<CMat> {
    let Qr { q, r } = qr(m);
    let qtb = q.adjoint() * rhs;
    r.solve_upper_triangular(&qtb)
        .filter(is_finite)
        .ok_or_else(|| Error::Singular("rank-deficient least-squares problem".into()))
}

/// Zeroes entries below the first subdiagonal.
pub fn force_hessenberg(h: &mut CMat) {
    let n = h.nrows();
    for j in 0..h.ncols() {
        for i in (j + 2)..n {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
}

/// Distance between two complex multisets after canonical sorting and
/// greedy nearest pairing. Each deviation is measured relative to
/// `max(1, |reference|)`. Returns `inf` when cardinalities differ.
pub fn multiset_distance(computed: &[C64], reference: &[C64]) -> f64 {
    if computed.len() != reference.len() {
        return f64::INFINITY;
    }
    let mut refs: Vec<C64> = reference.to_vec();
    sort_complex(&mut refs);
    let mut comp: Vec<C64> = computed.to_vec();
    sort_complex(&mut comp);
    let mut used = vec![false; comp.len()];
    let mut worst: f64 = 0.0;
    for r in &refs {
        let (idx, dist) = comp
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, c)| (i, (c - r).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, x| {
                if x.1 < acc.1 {
                    x
                } else {
                    acc
                }
            });
        used[idx] = true;
        worst = worst.max(dist / r.norm().max(1.0));
    }
    worst
}

pub fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Copies a sub-block.
pub fn block(m: &CMat, row: usize, col: usize, nrows: usize, ncols: usize) -> CMat {
    m.view((row, col), (nrows, ncols)).into_owned()
}

pub fn set_block(m: &mut CMat, row: usize, col: usize, b: &CMat) {
    m.view_mut((row, col), b.shape()).copy_from(b);
}

/// `[a b]`
pub fn hcat(parts: &[&CMat]) -> CMat {
    let rows = parts.first().map_or(0, |p| p.nrows());
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut c = 0;
    for p in parts {
        assert_eq!(p.nrows(), rows, "hcat row mismatch");
        set_block(&mut out, 0, c, p);
        c += p.ncols();
    }
    out
}

//! Test-side oracles, written independently of the library kernels: block
//! Krylov bases by classical Gram-Schmidt with reorthogonalization, least
//! squares through nalgebra's SVD and eigenvalues through nalgebra's Schur
//! form.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type M = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Orthonormal basis of `K_j(A, R0)` (at most `j * p` columns; fewer on breakdown).
pub fn krylov_basis(a: &M, r0: &M, j: usize) -> M {
    let n = a.nrows();
    let mut cols: Vec<nalgebra::DVector<C64>> = Vec::new();
    let mut w = r0.clone();
    for _ in 0..j {
        let mut added = Vec::new();
        for col in w.column_iter() {
            let mut v = col.into_owned();
            let before = v.norm();
            for _ in 0..2 {
                for q in &cols {
                    let s = q.dotc(&v);
                    v -= q * s;
                }
            }
            let nv = v.norm();
            if nv <= 1e-12 * before.max(1e-300) || nv == 0.0 {
                continue;
            }
            v /= c(nv, 0.0);
            cols.push(v.clone());
            added.push(v);
        }
        if added.is_empty() {
            break;
        }
        let mut next = M::zeros(n, added.len());
        for (i, v) in added.iter().enumerate() {
            next.set_column(i, &(a * v));
        }
        w = next;
    }
    if cols.is_empty() {
        return M::zeros(n, 0);
    }
    M::from_columns(&cols)
}

/// `min_Y ||R0 - A V Y||` residual.
pub fn ls_residual(a: &M, r0: &M, v: &M) -> M {
    if v.ncols() == 0 {
        return r0.clone();
    }
    let av = a * v;
    let y = av
        .clone()
        .svd(true, true)
        .solve(r0, 1e-300)
        .expect("svd solve");
    r0 - av * y
}

/// Upper triangular factor with non-negative real diagonal of `R`.
pub fn nq(r: &M) -> M {
    let p = r.ncols();
    let mut f = r.clone().qr().r();
    for k in 0..p {
        let d = f[(k, k)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            for j in 0..p {
                f[(k, j)] *= ph.conj();
            }
            f[(k, k)] = c(f[(k, k)].re, 0.0);
        }
    }
    f
}

pub fn eigs(m: &M) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    m.clone()
        .schur()
        .eigenvalues()
        .expect("schur")
        .iter()
        .cloned()
        .collect()
}

/// One GMRES cycle: residual matrices `R_0..R_m` and Ritz sets for `1..=m`.
pub struct OracleCycle {
    pub residuals: Vec<M>,
    pub ritz: Vec<Vec<C64>>,
}

pub fn gmres_cycle(a: &M, r0: &M, m: usize) -> OracleCycle {
    let vm = krylov_basis(a, r0, m);
    let p = r0.ncols();
    let mut residuals = vec![r0.clone()];
    let mut ritz = Vec::new();
    for j in 1..=m {
        let cols = (j * p).min(vm.ncols());
        let v = vm.columns(0, cols).into_owned();
        residuals.push(ls_residual(a, r0, &v));
        ritz.push(eigs(&(v.adjoint() * a * &v)));
    }
    OracleCycle { residuals, ritz }
}

pub fn restarted(a: &M, b: &M, m: usize, cycles: usize) -> Vec<OracleCycle> {
    let mut r = b.clone();
    let mut out = Vec::new();
    for _ in 0..cycles {
        let cyc = gmres_cycle(a, &r, m);
        r = cyc.residuals[m].clone();
        out.push(cyc);
    }
    out
}

/// Greedy nearest pairing after sorting, relative to `max(1, |ref|)`.
pub fn set_dist(got: &[C64], want: &[C64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    let mut w = want.to_vec();
    w.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut used = vec![false; got.len()];
    let mut worst: f64 = 0.0;
    for z in &w {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, g) in got.iter().enumerate() {
            let d = (g - z).norm();
            if !used[i] && d < best.1 {
                best = (i, d);
            }
        }
        used[best.0] = true;
        worst = worst.max(best.1 / z.norm().max(1.0));
    }
    worst
}

pub fn rel(a: &M, b: &M) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// `n x p` complex Gaussian matrix from a seed.
pub fn gaussian(n: usize, p: usize, seed: u64) -> M {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    M::from_fn(n, p, |_, _| {
        c(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    })
}

use super::{CMat, C64};
use crate::error::{Error, Result};

/// Largest matrix accepted by [`eig`].
pub const EIG_MAX_DIM: usize = 512;

/// Unitary reduction to upper Hessenberg form by Householder similarity.
pub fn hessenberg(m: &CMat) -> CMat {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hessenberg requires a square matrix");
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let norm_x = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);
        // left: rows k+1.., all columns
        for j in 0..n {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)])
                .sum();
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= *vi * (s * 2.0);
            }
        }
        // right: columns k+1.., all rows
        for i in 0..n {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| h[(i, k + 1 + t)] * vi)
                .sum();
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= s * vi.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    h
}

/// Eigenvalues (with multiplicity) of a square complex matrix.
///
/// Hessenberg reduction followed by single-shift complex QR sweeps with
/// Wilkinson shifts and an exceptional shift every tenth sweep without
/// deflation. Gives up after `100 * dim` sweeps.
pub fn eig(m: &CMat) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension(format!(
            "eig of {}x{} matrix",
            n,
            m.ncols()
        )));
    }
    if n > EIG_MAX_DIM {
        return Err(Error::EigTooLarge {
            dim: n,
            cap: EIG_MAX_DIM,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(m);
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let cap = 100 * n;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut values = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;

    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { scale } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        sweeps += 1;
        since_deflation += 1;
        if sweeps > cap {
            return Err(Error::EigNoConvergence {
                dim: n,
                iterations: sweeps - 1,
            });
        }
        let shift = if since_deflation % 10 == 0 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.3 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(values)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Explicitly shifted QR step on the window `lo..=hi` of a Hessenberg matrix.
fn qr_sweep(h: &mut CMat, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        h[(k + 1, k)] = C64::new(0.0, 0.0);
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    if b.norm() == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    let rho = a.norm().hypot(b.norm());
    let c = a.norm() / rho;
    let s = (a / a.norm()) * b.conj() / rho;
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        c64, companion, diag_real, inverse, multiset_distance, poly_from_roots, real, rng_from_seed,
    };
    use rand_distr::{Distribution, StandardNormal};

    fn random(n: usize, seed: u64) -> CMat {
        let mut rng = rng_from_seed(seed);
        CMat::from_fn(n, n, |_, _| {
            c64(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
    }

    #[test]
    fn diagonal_spectrum() {
        let vals = eig(&diag_real(&[1.0, 2.0, 3.0])).unwrap();
        assert!(multiset_distance(&vals, &[real(1.0), real(2.0), real(3.0)]) < 1e-15);
    }

    #[test]
    fn companion_roots() {
        let c = companion(&poly_from_roots(&[real(1.0), real(2.0)]));
        let vals = eig(&c).unwrap();
        assert!(multiset_distance(&vals, &[real(1.0), real(2.0)]) < 1e-10);
    }

    #[test]
    fn similarity_invariance() {
        let m = random(7, 3);
        let mut p = random(7, 4);
        for i in 0..7 {
            p[(i, i)] += real(6.0);
        }
        let sim = &p * &m * inverse(&p).unwrap();
        let a = eig(&m).unwrap();
        let b = eig(&sim).unwrap();
        assert!(multiset_distance(&b, &a) < 1e-8);
    }

    #[test]
    fn hessenberg_is_similar() {
        let m = random(6, 9);
        let h = hessenberg(&m);
        for j in 0..6 {
            for i in j + 2..6 {
                assert_eq!(h[(i, j)], c64(0.0, 0.0));
            }
        }
        let tr_m: C64 = (0..6).map(|i| m[(i, i)]).sum();
        let tr_h: C64 = (0..6).map(|i| h[(i, i)]).sum();
        assert!((tr_m - tr_h).norm() < 1e-12);
        assert!((m.norm() - h.norm()).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_nalgebra_schur() {
        let m = random(12, 21);
        let ours = eig(&m).unwrap();
        let theirs: Vec<C64> = m
            .clone()
            .schur()
            .eigenvalues()
            .unwrap()
            .iter()
            .cloned()
            .collect();
        assert!(multiset_distance(&ours, &theirs) < 1e-9);
    }

    #[test]
    fn jordan_block_and_zero_matrix() {
        let z = CMat::zeros(4, 4);
        assert!(eig(&z).unwrap().iter().all(|v| v.norm() == 0.0));
        let mut j = CMat::identity(3, 3) * real(2.0);
        j[(0, 1)] = real(1.0);
        j[(1, 2)] = real(1.0);
        let vals = eig(&j).unwrap();
        assert!(multiset_distance(&vals, &[real(2.0); 3]) < 1e-10);
    }

    #[test]
    fn rejects_oversized_input() {
        let big = CMat::zeros(EIG_MAX_DIM + 1, EIG_MAX_DIM + 1);
        assert!(matches!(eig(&big), Err(Error::EigTooLarge { .. })));
    }
}

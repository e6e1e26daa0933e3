use super::{CMat, C64};

/// Economy QR factors with `R` carrying a real non-negative diagonal.
#[derive(Clone, Debug)]
pub struct Qr {
    pub q: CMat,
    pub r: CMat,
}

impl Qr {
    /// Smallest diagonal entry of `R`; zero signals rank deficiency.
    pub fn min_diag(&self) -> f64 {
        (0..self.r.ncols())
            .map(|i| self.r[(i, i)].re)
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of diagonal entries of `R` above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        (0..self.r.ncols())
            .filter(|&i| self.r[(i, i)].re > tol)
            .count()
    }
}

/// Householder QR of a tall (or square) matrix.
///
/// The phase of each column of `Q` is rotated so that `R` has a real,
/// non-negative diagonal. A zero column produces a zero diagonal entry.
pub fn qr(m: &CMat) -> Qr {
    let (nr, nc) = m.shape();
    assert!(nr >= nc, "qr requires rows >= cols, got {nr}x{nc}");
    let mut r = m.clone();
    let mut reflectors: Vec<Option<Vec<C64>>> = Vec::with_capacity(nc);

    for k in 0..nc {
        let norm_x = (k..nr).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            reflectors.push(None);
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;
        let mut v: Vec<C64> = (k..nr).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            reflectors.push(None);
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);
        apply_reflector(&mut r, &v, k, k..nc);
        for i in k + 1..nr {
            r[(i, k)] = C64::new(0.0, 0.0);
        }
        reflectors.push(Some(v));
    }

    // Q = H_0 H_1 ... H_{nc-1} [I; 0]
    let mut q = CMat::identity(nr, nc);
    for (k, refl) in reflectors.iter().enumerate().rev() {
        if let Some(v) = refl {
            apply_reflector(&mut q, v, k, 0..nc);
        }
    }

    let mut r = r.rows(0, nc).into_owned();
    for k in 0..nc {
        let d = r[(k, k)];
        let a = d.norm();
        if a > 0.0 {
            let ph = d / a;
            for j in k..nc {
                r[(k, j)] *= ph.conj();
            }
            for i in 0..nr {
                q[(i, k)] *= ph;
            }
            r[(k, k)] = C64::new(a, 0.0);
        } else {
            r[(k, k)] = C64::new(0.0, 0.0);
        }
    }
    Qr { q, r }
}

/// Applies `I - 2 v v^*` (with `v` acting on rows `offset..`) to the given columns.
fn apply_reflector(m: &mut CMat, v: &[C64], offset: usize, cols: std::ops::Range<usize>) {
    for j in cols {
        let mut s = C64::new(0.0, 0.0);
        for (t, vi) in v.iter().enumerate() {
            s += vi.conj() * m[(offset + t, j)];
        }
        if s == C64::new(0.0, 0.0) {
            continue;
        }
        for (t, vi) in v.iter().enumerate() {
            m[(offset + t, j)] -= *vi * (s * 2.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, identity, orthonormality_residual, real, rng_from_seed};
    use rand_distr::{Distribution, StandardNormal};

    /// Modified Gram-Schmidt with positive real diagonal; test-side oracle.
    fn mgs(m: &CMat) -> (CMat, CMat) {
        let (nr, nc) = m.shape();
        let mut q = m.clone();
        let mut r = CMat::zeros(nc, nc);
        for k in 0..nc {
            for i in 0..k {
                let qi = q.column(i).into_owned();
                let s = qi.dotc(&q.column(k));
                r[(i, k)] = s;
                let upd = q.column(k) - qi * s;
                q.set_column(k, &upd);
            }
            let nrm = q.column(k).norm();
            r[(k, k)] = real(nrm);
            let col = q.column(k) / real(nrm);
            q.set_column(k, &col);
        }
        assert_eq!(q.nrows(), nr);
        (q, r)
    }

    fn random(nr: usize, nc: usize, seed: u64) -> CMat {
        let mut rng = rng_from_seed(seed);
        CMat::from_fn(nr, nc, |_, _| {
            c64(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
    }

    #[test]
    fn identity_factors_trivially() {
        let f = qr(&identity(3));
        assert!((f.q - identity(3)).norm() < 1e-15);
        assert!((f.r - identity(3)).norm() < 1e-15);
    }

    #[test]
    fn permutation_gets_nonnegative_diagonal() {
        let m = CMat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        let f = qr(&m);
        let (q_ref, r_ref) = mgs(&m);
        assert!((&f.q - &q_ref).norm() < 1e-14);
        assert!((&f.r - &r_ref).norm() < 1e-14);
        assert!((f.q - &m).norm() < 1e-14);
        assert!((f.r - identity(2)).norm() < 1e-14);
    }

    #[test]
    fn random_tall_matches_gram_schmidt() {
        let m = random(6, 4, 11);
        let f = qr(&m);
        assert!(orthonormality_residual(&f.q) <= 1e-12);
        assert!((&f.q * &f.r - &m).norm() <= 1e-12 * m.norm());
        let (q_ref, r_ref) = mgs(&m);
        assert!((&f.q - q_ref).norm() < 1e-10);
        assert!((&f.r - r_ref).norm() < 1e-10 * m.norm());
        for i in 0..4 {
            assert_eq!(f.r[(i, i)].im, 0.0);
            assert!(f.r[(i, i)].re >= 0.0);
            for j in 0..i {
                assert_eq!(f.r[(i, j)], c64(0.0, 0.0));
            }
        }
    }

    #[test]
    fn rank_deficiency_shows_in_diagonal() {
        let mut m = random(5, 3, 4);
        let c0 = m.column(0).into_owned();
        m.set_column(2, &(c0 * c64(2.0, -1.0)));
        let f = qr(&m);
        assert!(f.min_diag() < 1e-12 * m.norm());
        assert_eq!(f.rank(1e-10 * m.norm()), 2);
        assert!((&f.q * &f.r - &m).norm() <= 1e-12 * m.norm());
    }
}

use crate::error::{Error, Result};
use crate::krylov::RunTrace;
use crate::linalg::{block, eig, hcat, norm2, qr, set_block, solve, CMat, C64};

/// The assembled restarted factorization `A Vt = Vt Ht`, shared by the scalar
/// (`p = 1`) and block constructions.
///
/// `Vt` and `Ht` are kept in standard coordinates; `A = Q Vt Ht(C) Vt^{-1} Q^*`
/// and `B = Q E_1 F_0` for the basis unitary `Q`.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub p: usize,
    /// Cycle length in block steps.
    pub m: usize,
    pub cycles: usize,
    pub v_tilde: CMat,
    /// `Ht` without tail.
    pub h_tilde: CMat,
    pub q: CMat,
    /// Tail coefficients `C` (`n x p`), zero for the plain construction.
    pub tail: CMat,
    /// `H^{(l)}_{M+1,M}`, the subdiagonal block dropped by the last-cycle closure.
    pub last_subdiagonal: CMat,
    pub a: CMat,
    pub b: CMat,
}

impl Assembly {
    /// `underline_h[k]` is the `(M+1)p x Mp` Hessenberg of cycle `k`,
    /// `ghat[k]` the normalized residual coefficients `G_k F^{-1}`
    /// (`(M+1)p x p`) for every cycle but the last.
    pub(crate) fn new(
        p: usize,
        m: usize,
        underline_h: &[CMat],
        ghat: &[CMat],
        start: &CMat,
        q: CMat,
    ) -> Result<Self> {
        let cycles = underline_h.len();
        let mp = m * p;
        let n = mp * cycles;
        let mut v_tilde = CMat::zeros(n, n);
        let mut h_tilde = CMat::zeros(n, n);
        let mut vk = CMat::identity(n, mp);
        for k in 0..cycles {
            let col = k * mp;
            set_block(&mut v_tilde, 0, col, &vk);
            let hk = &underline_h[k];
            if k + 1 == cycles {
                set_block(&mut h_tilde, col, col, &block(hk, 0, 0, mp, mp));
                break;
            }
            let g = &ghat[k];
            let next = col + mp;
            let w = block(&CMat::identity(n, n), 0, next, n, p);
            let first = hcat(&[&vk, &w]) * g;
            let mut pm = CMat::identity(mp + p, mp + p);
            set_block(&mut pm, 0, mp, g);
            let coupled =
                solve(&pm, hk).map_err(|_| Error::EndOfCycleStagnation { cycle: k + 1 })?;
            set_block(&mut h_tilde, col, col, &coupled);
            vk = CMat::zeros(n, mp);
            set_block(&mut vk, 0, 0, &first);
            if m > 1 {
                set_block(
                    &mut vk,
                    0,
                    p,
                    &block(&CMat::identity(n, n), 0, next + p, n, mp - p),
                );
            }
        }
        let last = &underline_h[cycles - 1];
        let last_subdiagonal = block(last, mp, mp - p, p, p);
        let mut b = CMat::zeros(n, p);
        set_block(&mut b, 0, 0, start);
        let b = &q * b;
        let tail = CMat::zeros(n, p);
        let a = a_from(&v_tilde, &h_tilde, &tail, &q)?;
        Ok(Assembly {
            p,
            m,
            cycles,
            v_tilde,
            h_tilde,
            q,
            tail,
            last_subdiagonal,
            a,
            b,
        })
    }

    pub fn n(&self) -> usize {
        self.v_tilde.nrows()
    }

    /// `Ht(C) = Ht + C E_N^T`.
    pub fn h_with_tail(&self) -> CMat {
        let n = self.n();
        let mut h = self.h_tilde.clone();
        let cols = block(&h, 0, n - self.p, n, self.p) + &self.tail;
        set_block(&mut h, 0, n - self.p, &cols);
        h
    }

    /// Rank-one (rank-`p`) tail update with `C = C_hat H^{(l)}_{M+1,M}`;
    /// `c_hat = 0` reproduces `A` bit for bit.
    pub fn with_tail(&self, c_hat: &CMat) -> Result<Self> {
        if c_hat.shape() != (self.n(), self.p) {
            return Err(Error::Dimension(format!(
                "tail is {:?}, expected {}x{}",
                c_hat.shape(),
                self.n(),
                self.p
            )));
        }
        let mut out = self.clone();
        out.tail = c_hat * &self.last_subdiagonal;
        out.a = a_from(&out.v_tilde, &out.h_tilde, &out.tail, &out.q)?;
        Ok(out)
    }

    /// Cycle bases `V^{(k)}` in the chosen coordinates.
    pub fn bases(&self) -> Vec<CMat> {
        let mp = self.m * self.p;
        (0..self.cycles)
            .map(|k| &self.q * block(&self.v_tilde, 0, k * mp, self.n(), mp))
            .collect()
    }

    /// Eigenvalues of the diagonal blocks of `Ht` (tail excluded).
    pub fn eigenvalues_from_blocks(&self) -> Result<Vec<C64>> {
        let mp = self.m * self.p;
        let mut out = Vec::with_capacity(self.n());
        for k in 0..self.cycles {
            out.extend(eig(&block(&self.h_tilde, k * mp, k * mp, mp, mp))?);
        }
        Ok(out)
    }

    /// `Q Vt (E_1 F_0 - Ht(C) Y)` with `Y = Vt^{-1} Q^* X`; equals `B - A X`.
    pub fn final_residual_formula(&self, x: &CMat) -> Result<CMat> {
        let y = solve(&self.v_tilde, &(self.q.adjoint() * x))?;
        let mut e = CMat::zeros(self.n(), self.p);
        set_block(
            &mut e,
            0,
            0,
            &block(&(self.q.adjoint() * &self.b), 0, 0, self.p, self.p),
        );
        Ok(&self.q * &self.v_tilde * (e - self.h_with_tail() * y))
    }

    /// `||A Vt - Vt Ht(C)|| / ||A||` in the chosen coordinates.
    pub fn relation_residual(&self) -> f64 {
        let qv = &self.q * &self.v_tilde;
        (&self.a * &qv - &qv * self.h_with_tail()).norm() / self.a.norm().max(f64::MIN_POSITIVE)
    }

    pub fn cond_v(&self) -> f64 {
        crate::linalg::cond2(&self.v_tilde)
    }
}

/// `A = Q Vt (Ht + C E_N^T) Vt^{-1} Q^*`.
fn a_from(v: &CMat, h: &CMat, tail: &CMat, q: &CMat) -> Result<CMat> {
    let n = v.nrows();
    let p = tail.ncols();
    let mut ht = h.clone();
    let cols = block(&ht, 0, n - p, n, p) + tail;
    set_block(&mut ht, 0, n - p, &cols);
    let x = v * ht;
    let upper = (0..n).all(|j| (j + 1..n).all(|i| v[(i, j)] == C64::new(0.0, 0.0)));
    let vt = v.transpose();
    let at = if upper {
        vt.solve_lower_triangular(&x.transpose())
            .ok_or_else(|| Error::Singular("assembled basis".into()))?
    } else {
        solve(&vt, &x.transpose())?
    };
    Ok(q * at.transpose() * q.adjoint())
}

/// The restarted (block) Krylov matrix of a run and its numerical rank.
#[derive(Clone, Debug)]
pub struct KrylovRank {
    pub k: CMat,
    pub rank: usize,
    /// Smallest `R` diagonal of the column-normalized matrix over its 2-norm.
    pub min_ratio: f64,
    pub full_rank: bool,
}

pub(crate) fn krylov_rank(a: &CMat, trace: &RunTrace) -> KrylovRank {
    let n = a.nrows();
    let mut cols: Vec<CMat> = Vec::new();
    for c in &trace.cycles {
        let mut r = c.r_start.clone();
        for _ in 0..trace.m {
            cols.push(r.clone());
            r = a * r;
        }
    }
    let refs: Vec<&CMat> = cols.iter().collect();
    let mut k = if refs.is_empty() {
        CMat::zeros(n, 0)
    } else {
        hcat(&refs)
    };
    for mut col in k.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= C64::new(nrm, 0.0);
        }
    }
    let (rank, min_ratio) = if k.ncols() == 0 || k.ncols() > n {
        (0, 0.0)
    } else {
        let scale = norm2(&k);
        let f = qr(&k);
        (f.rank(1e-10 * scale), f.min_diag() / scale)
    };
    let full_rank = k.ncols() == n && rank == n;
    KrylovRank {
        k,
        rank,
        min_ratio,
        full_rank,
    }
}

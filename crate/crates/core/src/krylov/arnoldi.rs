use crate::block::NormalizingQuantity;
use crate::error::{Error, Result};
use crate::linalg::{block, eig, qr, set_block, CMat, C64};

/// Block Arnoldi factorization `A V_j = V_{j+1} H_j` (scalar when `p = 1`).
#[derive(Clone, Debug)]
pub struct ArnoldiDecomp {
    /// Orthonormal basis, `n x (steps + 1) p`; only `n x steps p` after breakdown.
    pub v: CMat,
    /// Block upper Hessenberg, `(steps + 1) p x steps p`. The last block row is
    /// zero after breakdown.
    pub h: CMat,
    /// Normalizing quantity of the starting block.
    pub start: NormalizingQuantity,
    pub steps: usize,
    pub p: usize,
    /// The Krylov space became invariant at `steps`.
    pub breakdown: bool,
}

impl ArnoldiDecomp {
    /// Leading square `jp x jp` block of the Hessenberg matrix.
    pub fn h_square(&self, j: usize) -> CMat {
        block(&self.h, 0, 0, j * self.p, j * self.p)
    }

    /// `(j+1)p x jp` leading rectangular block.
    pub fn h_under(&self, j: usize) -> CMat {
        block(&self.h, 0, 0, (j + 1) * self.p, j * self.p)
    }

    /// Basis block `V_i` (0-based), `n x p`.
    pub fn v_block(&self, i: usize) -> CMat {
        block(&self.v, 0, i * self.p, self.v.nrows(), self.p)
    }

    /// Subdiagonal block `H_{j+1,j}` (1-based `j`).
    pub fn subdiagonal(&self, j: usize) -> CMat {
        block(&self.h, j * self.p, (j - 1) * self.p, self.p, self.p)
    }

    /// `||A V_j - V_{j+1} H_j||_F`.
    pub fn relation_residual(&self, a: &CMat) -> f64 {
        let jp = self.steps * self.p;
        let vj = block(&self.v, 0, 0, self.v.nrows(), jp);
        let rows = self.v.ncols().min(self.h.nrows());
        let vh = block(&self.v, 0, 0, self.v.nrows(), rows) * block(&self.h, 0, 0, rows, jp);
        (a * vj - vh).norm()
    }
}

/// Block Arnoldi with modified Gram-Schmidt and one reorthogonalization pass.
///
/// Stops early when the new block vanishes (below `1e-13 ||A||`). A new block
/// that is rank deficient without vanishing is a block breakdown and fails,
/// unless it is the closing block of step `m`.
pub fn block_arnoldi(a: &CMat, b: &CMat, m: usize) -> Result<ArnoldiDecomp> {
    let n = a.nrows();
    let p = b.ncols();
    if a.ncols() != n || b.nrows() != n || p == 0 {
        return Err(Error::Dimension(format!(
            "A is {}x{}, B is {}x{}",
            n,
            a.ncols(),
            b.nrows(),
            p
        )));
    }
    if m * p > n {
        return Err(Error::Dimension(format!(
            "{m} steps of width {p} exceed dimension {n}"
        )));
    }
    if b.norm() == 0.0 {
        return Err(Error::ZeroStart);
    }
    let f0 = qr(b);
    let tol_start = 1e-12 * b.norm();
    let rank0 = f0.rank(tol_start);
    if rank0 < p {
        return Err(Error::BlockBreakdown {
            step: 0,
            rank: rank0,
            p,
        });
    }
    let anorm = a.norm().max(f64::MIN_POSITIVE);
    let mut v = CMat::zeros(n, (m + 1) * p);
    let mut h = CMat::zeros((m + 1) * p, m * p);
    set_block(&mut v, 0, 0, &f0.q);
    let mut steps = 0;
    let mut breakdown = false;

    for j in 0..m {
        let vj = block(&v, 0, j * p, n, p);
        let mut w = a * vj;
        for _pass in 0..2 {
            for i in 0..=j {
                let vi = block(&v, 0, i * p, n, p);
                let hij = vi.adjoint() * &w;
                w -= &vi * &hij;
                let cur = block(&h, i * p, j * p, p, p);
                set_block(&mut h, i * p, j * p, &(cur + hij));
            }
        }
        steps = j + 1;
        if (j + 1) * p == n {
            // the whole space is spanned; the next block is zero in exact arithmetic
            breakdown = true;
            break;
        }
        let f = qr(&w);
        let tol = 1e-13 * anorm;
        let rank = f.rank(tol);
        if rank == 0 {
            breakdown = true;
            break;
        }
        // a deficient last block needs no continuation; H_{m+1,m} = R still holds
        if rank < p && j + 1 < m {
            return Err(Error::BlockBreakdown {
                step: j + 1,
                rank,
                p,
            });
        }
        set_block(&mut v, 0, (j + 1) * p, &f.q);
        set_block(&mut h, (j + 1) * p, j * p, &f.r);
    }

    let vcols = if breakdown {
        steps * p
    } else {
        (steps + 1) * p
    };
    Ok(ArnoldiDecomp {
        v: block(&v, 0, 0, n, vcols),
        h: block(&h, 0, 0, (steps + 1) * p, steps * p),
        start: NormalizingQuantity::from_qr_factor(f0.r),
        steps,
        p,
        breakdown,
    })
}

/// Scalar Arnoldi; `b` is an `n x 1` matrix.
pub fn arnoldi(a: &CMat, b: &CMat, m: usize) -> Result<ArnoldiDecomp> {
    assert_eq!(b.ncols(), 1, "arnoldi expects a single right-hand side");
    block_arnoldi(a, b, m)
}

/// Eigenvalues of `H_j` for `j = 1..=steps` (`jp` values each).
pub fn ritz_per_step(d: &ArnoldiDecomp) -> Result<Vec<Vec<C64>>> {
    (1..=d.steps).map(|j| eig(&d.h_square(j))).collect()
}

/// The block residual coefficient `E_1 F_0 - H_j Y` minimization at step `j`:
/// returns `(Y, F_j)` where `F_j` is the normalizing quantity of the residual.
pub(crate) fn least_squares_step(d: &ArnoldiDecomp, j: usize) -> (CMat, NormalizingQuantity) {
    let p = d.p;
    let rows = (j + 1) * p;
    let mut aug = CMat::zeros(rows, rows);
    set_block(&mut aug, 0, 0, &d.h_under(j));
    set_block(&mut aug, 0, j * p, d.start.matrix());
    let r = qr(&aug).r;
    let r11 = block(&r, 0, 0, j * p, j * p);
    let r12 = block(&r, 0, j * p, j * p, p);
    let y = r11
        .solve_upper_triangular(&r12)
        .unwrap_or_else(|| CMat::zeros(j * p, p));
    (
        y,
        NormalizingQuantity::from_qr_factor(block(&r, j * p, j * p, p, p)),
    )
}

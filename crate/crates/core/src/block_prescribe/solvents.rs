use crate::error::{Error, Result};
use crate::linalg::{cond2, eig, identity, set_block, CMat, C64};

/// Ritz or spectral data of one block step: right solvents `S_i`, or the
/// coefficients `C_k` of `M(S) = S^j - sum_k C_k S^k` directly.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockRitz {
    Solvents(Vec<CMat>),
    Coefficients(Vec<CMat>),
}

impl BlockRitz {
    pub fn degree(&self) -> usize {
        match self {
            BlockRitz::Solvents(s) => s.len(),
            BlockRitz::Coefficients(c) => c.len(),
        }
    }

    pub fn coefficients(&self) -> Result<Vec<CMat>> {
        match self {
            BlockRitz::Solvents(s) => solvents_to_coeffs(s),
            BlockRitz::Coefficients(c) => Ok(c.clone()),
        }
    }

    /// Latent roots: eigenvalues of the solvents, or of the block companion.
    pub fn latent_roots(&self) -> Result<Vec<C64>> {
        match self {
            BlockRitz::Solvents(s) => {
                let mut out = Vec::new();
                for si in s {
                    out.extend(eig(si)?);
                }
                Ok(out)
            }
            BlockRitz::Coefficients(c) => eig(&block_companion(c)),
        }
    }

    /// `C_0` is (numerically) singular.
    pub fn singular_constant(&self) -> Result<bool> {
        let c = self.coefficients()?;
        let c0 = &c[0];
        let scale = c.iter().map(|x| x.norm()).fold(1.0, f64::max);
        Ok(c0.norm() <= 1e-14 * scale || cond2(c0) > 1e12)
    }

    /// `C_0` vanishes.
    pub fn zero_constant(&self) -> Result<bool> {
        let c = self.coefficients()?;
        let scale = c.iter().map(|x| x.norm()).fold(1.0, f64::max);
        Ok(c[0].norm() <= 1e-14 * scale)
    }
}

fn power(s: &CMat, k: usize) -> CMat {
    let mut out = identity(s.nrows());
    for _ in 0..k {
        out = &out * s;
    }
    out
}

/// Block Vandermonde `[S_i^k]` with block rows `k` and block columns `i`.
fn vandermonde(solvents: &[CMat]) -> CMat {
    let j = solvents.len();
    let p = solvents[0].nrows();
    let mut v = CMat::zeros(j * p, j * p);
    for (i, s) in solvents.iter().enumerate() {
        for k in 0..j {
            set_block(&mut v, k * p, i * p, &power(s, k));
        }
    }
    v
}

/// Coefficients `C_0..C_{j-1}` with `sum_k C_k S_i^k = S_i^j` for all `j` solvents.
pub fn solvents_to_coeffs(solvents: &[CMat]) -> Result<Vec<CMat>> {
    let j = solvents.len();
    if j == 0 {
        return Ok(Vec::new());
    }
    let p = solvents[0].nrows();
    if solvents.iter().any(|s| s.shape() != (p, p)) {
        return Err(Error::Dimension(
            "solvents must all be square of the same size".into(),
        ));
    }
    let v = vandermonde(solvents);
    let cond = cond2(&v);
    if !(cond < 1e12) {
        let mut indices = Vec::new();
        for a in 0..j {
            for b in a + 1..j {
                if !(cond2(&vandermonde(&[solvents[a].clone(), solvents[b].clone()])) < 1e12) {
                    indices.extend([a, b]);
                }
            }
        }
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            indices = (0..j).collect();
        }
        return Err(Error::SingularVandermonde { indices, cond });
    }
    let mut rhs = CMat::zeros(p, j * p);
    for (i, s) in solvents.iter().enumerate() {
        set_block(&mut rhs, 0, i * p, &power(s, j));
    }
    // X V = R  <=>  V^T X^T = R^T
    let x = crate::linalg::solve(&v.transpose(), &rhs.transpose())?.transpose();
    Ok((0..j).map(|k| x.columns(k * p, p).into_owned()).collect())
}

/// Identity blocks on the block subdiagonal and `C_k` in the last block column.
pub fn block_companion(coeffs: &[CMat]) -> CMat {
    let j = coeffs.len();
    assert!(j >= 1, "block companion requires degree >= 1");
    let p = coeffs[0].nrows();
    let mut m = CMat::zeros(j * p, j * p);
    for k in 1..j {
        set_block(&mut m, k * p, (k - 1) * p, &identity(p));
    }
    for (k, c) in coeffs.iter().enumerate() {
        set_block(&mut m, k * p, (j - 1) * p, c);
    }
    m
}

use super::{CMat, C64};

/// Coefficients `c_0..c_{j-1}` of the monic polynomial `z^j - sum_i c_i z^i`.
///
/// Note the sign: these are the *negated* standard monic coefficients, so
/// that the companion matrix carries them unchanged in its last column.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCoeffs(Vec<C64>);

impl PolyCoeffs {
    pub fn new(c: Vec<C64>) -> Self {
        PolyCoeffs(c)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    /// Standard monic coefficients `a_i` of `z^j + sum_i a_i z^i`, i.e. `-c_i`.
    pub fn monic(&self) -> Vec<C64> {
        self.0.iter().map(|c| -c).collect()
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * z - c;
        }
        acc
    }
}

/// Expands `prod (z - r_i)` and returns it as `z^j - sum c_i z^i`.
pub fn poly_from_roots(roots: &[C64]) -> PolyCoeffs {
    // ascending coefficients including the leading one
    let mut a = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![C64::new(0.0, 0.0); a.len() + 1];
        for (i, &ai) in a.iter().enumerate() {
            next[i + 1] += ai;
            next[i] -= r * ai;
        }
        a = next;
    }
    a.pop();
    PolyCoeffs(a.into_iter().map(|v| -v).collect())
}

/// Companion matrix with ones on the subdiagonal and `c` in the last column.
pub fn companion(c: &PolyCoeffs) -> CMat {
    let j = c.degree();
    assert!(j >= 1, "companion matrix requires degree >= 1");
    let mut m = CMat::zeros(j, j);
    for i in 1..j {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for (i, &ci) in c.as_slice().iter().enumerate() {
        m[(i, j - 1)] = ci;
    }
    m
}

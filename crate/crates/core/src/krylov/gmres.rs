use crate::block::{blnorm, NormalizingQuantity};
use crate::error::{Error, Result};
use crate::linalg::{block, cond2, eig, norm2, set_block, CMat, C64};

use super::arnoldi::{block_arnoldi, least_squares_step, ArnoldiDecomp};

/// `H_j` counts as singular once its smallest singular value drops below
/// this fraction of `||underline(H_j)||_2`.
pub const FOM_SINGULAR_TOL: f64 = 1e-12;

/// FOM quantities at one step of a cycle.
#[derive(Clone, Debug)]
pub struct FomStep {
    /// `H_j` is numerically nonsingular: condition at most `1e14` and
    /// smallest singular value above `FOM_SINGULAR_TOL ||underline(H_j)||`.
    pub exists: bool,
    pub cond: f64,
    /// Normalizing quantity of the FOM residual `V_{j+1} H_{j+1,j} E_j^T Y_j`.
    pub residual: Option<NormalizingQuantity>,
    /// Coefficient block `H_{j+1,j} E_j^T Y_j` of the FOM residual.
    pub coefficient: Option<CMat>,
}

/// Everything recorded for one GMRES cycle.
#[derive(Clone, Debug)]
pub struct CycleTrace {
    pub decomp: ArnoldiDecomp,
    /// `F_0, ..., F_steps`; `1 x 1` in the scalar case.
    pub residuals: Vec<NormalizingQuantity>,
    /// Ritz values of `H_j`, `j = 1..=steps`.
    pub ritz: Vec<Vec<C64>>,
    /// FOM data for `j = 1..=steps`.
    pub fom: Vec<FomStep>,
    /// Starting residual of the cycle.
    pub r_start: CMat,
    /// GMRES residual after the last step, `R_0 - A V_m Y`.
    pub r_end: CMat,
    /// Accumulated iterate after the cycle.
    pub x: CMat,
}

impl CycleTrace {
    pub fn steps(&self) -> usize {
        self.decomp.steps
    }

    pub fn norms(&self) -> Vec<f64> {
        self.residuals
            .iter()
            .map(NormalizingQuantity::frobenius)
            .collect()
    }

    pub fn grams(&self) -> Vec<CMat> {
        self.residuals
            .iter()
            .map(NormalizingQuantity::gram)
            .collect()
    }
}

/// Trace of a (possibly restarted, possibly block) GMRES run.
#[derive(Clone, Debug)]
pub struct RunTrace {
    pub p: usize,
    pub m: usize,
    pub cycles: Vec<CycleTrace>,
    pub warnings: Vec<String>,
}

impl RunTrace {
    /// Frobenius norms of the residual normalizing quantities, per cycle.
    pub fn residual_norms(&self) -> Vec<Vec<f64>> {
        self.cycles.iter().map(CycleTrace::norms).collect()
    }

    pub fn solution(&self) -> Option<&CMat> {
        self.cycles.last().map(|c| &c.x)
    }
}

/// One GMRES cycle of at most `m` steps started from `x0` with residual `r0`.
/// The last recorded normalizing quantity is that of the updated residual
/// that starts the next cycle.
fn run_cycle(a: &CMat, r0: &CMat, x0: &CMat, m: usize) -> Result<CycleTrace> {
    let p = r0.ncols();
    let decomp = block_arnoldi(a, r0, m)?;
    let steps = decomp.steps;
    let mut residuals = Vec::with_capacity(steps + 1);
    residuals.push(decomp.start.clone());
    let mut ritz = Vec::with_capacity(steps);
    let mut fom = Vec::with_capacity(steps);
    let mut y_last = CMat::zeros(0, p);
    for j in 1..=steps {
        let (y, f) = least_squares_step(&decomp, j);
        residuals.push(f);
        let hj = decomp.h_square(j);
        ritz.push(eig(&hj)?);
        fom.push(fom_step(&decomp, &hj, j));
        y_last = y;
    }
    let vm = block(&decomp.v, 0, 0, a.nrows(), steps * p);
    let dx = &vm * &y_last;
    let r_end = r0 - a * &dx;
    residuals[steps] = blnorm(&r_end);
    let x = x0 + dx;
    Ok(CycleTrace {
        decomp,
        residuals,
        ritz,
        fom,
        r_start: r0.clone(),
        r_end,
        x,
    })
}

fn fom_step(d: &ArnoldiDecomp, hj: &CMat, j: usize) -> FomStep {
    let p = d.p;
    let cond = cond2(hj);
    let smin = hj
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let scale = norm2(&d.h_under(j));
    if !(cond <= 1e14) || smin <= FOM_SINGULAR_TOL * scale {
        return FomStep {
            exists: false,
            cond,
            residual: None,
            coefficient: None,
        };
    }
    let mut rhs = CMat::zeros(j * p, p);
    set_block(&mut rhs, 0, 0, d.start.matrix());
    let Some(y) = hj.clone().lu().solve(&rhs) else {
        return FomStep {
            exists: false,
            cond,
            residual: None,
            coefficient: None,
        };
    };
    let y_last = block(&y, (j - 1) * p, 0, p, p);
    let coefficient = d.subdiagonal_or_zero(j) * y_last;
    FomStep {
        exists: true,
        cond,
        residual: Some(blnorm(&coefficient)),
        coefficient: Some(coefficient),
    }
}

impl ArnoldiDecomp {
    fn subdiagonal_or_zero(&self, j: usize) -> CMat {
        if j * self.p < self.h.nrows() {
            self.subdiagonal(j)
        } else {
            CMat::zeros(self.p, self.p)
        }
    }
}

fn check_rhs(a: &CMat, b: &CMat) -> Result<()> {
    if a.nrows() != a.ncols() || b.nrows() != a.nrows() {
        return Err(Error::Dimension(format!(
            "A is {}x{}, right-hand side has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    Ok(())
}

/// Restarted block GMRES with cycle length `m` and `cycles` cycles, `x_0 = 0`.
///
/// The next cycle starts from the updated residual `R - A V_m Y` of the
/// previous one, so the last recorded value of a cycle equals the first of
/// the next. Stops early once the residual vanishes.
pub fn restarted_block_gmres(a: &CMat, b: &CMat, m: usize, cycles: usize) -> Result<RunTrace> {
    check_rhs(a, b)?;
    let n = a.nrows();
    let p = b.ncols();
    let mut warnings = Vec::new();
    if m * cycles * p > n {
        warnings.push(format!(
            "{} total iterations of width {p} exceed dimension {n}",
            m * cycles
        ));
    }
    let mut out = Vec::with_capacity(cycles);
    let mut x = CMat::zeros(n, p);
    let mut r = b.clone();
    let bnorm = b.norm();
    for k in 0..cycles {
        if k > 0 && r.norm() <= 1e-14 * bnorm {
            break;
        }
        let c = run_cycle(a, &r, &x, m)?;
        x = c.x.clone();
        r = c.r_end.clone();
        out.push(c);
    }
    Ok(RunTrace {
        p,
        m,
        cycles: out,
        warnings,
    })
}

pub fn block_gmres_run(a: &CMat, b: &CMat, m: usize) -> Result<RunTrace> {
    restarted_block_gmres(a, b, m, 1)
}

pub fn restarted_gmres(a: &CMat, b: &CMat, m: usize, cycles: usize) -> Result<RunTrace> {
    assert_eq!(
        b.ncols(),
        1,
        "restarted_gmres expects a single right-hand side"
    );
    restarted_block_gmres(a, b, m, cycles)
}

pub fn gmres_run(a: &CMat, b: &CMat, m: usize) -> Result<RunTrace> {
    restarted_gmres(a, b, m, 1)
}

/// FOM steps of a single cycle: existence flags and residuals.
#[derive(Clone, Debug)]
pub struct FomTrace {
    pub decomp: ArnoldiDecomp,
    pub steps: Vec<FomStep>,
    /// FOM iterates `V_j Y_j` where they exist.
    pub iterates: Vec<Option<CMat>>,
}

pub fn block_fom_run(a: &CMat, b: &CMat, m: usize) -> Result<FomTrace> {
    check_rhs(a, b)?;
    let p = b.ncols();
    let decomp = block_arnoldi(a, b, m)?;
    let mut steps = Vec::with_capacity(decomp.steps);
    let mut iterates = Vec::with_capacity(decomp.steps);
    for j in 1..=decomp.steps {
        let hj = decomp.h_square(j);
        let step = fom_step(&decomp, &hj, j);
        let x = if step.exists {
            let mut rhs = CMat::zeros(j * p, p);
            set_block(&mut rhs, 0, 0, decomp.start.matrix());
            hj.clone()
                .lu()
                .solve(&rhs)
                .map(|y| block(&decomp.v, 0, 0, a.nrows(), j * p) * y)
        } else {
            None
        };
        steps.push(step);
        iterates.push(x);
    }
    Ok(FomTrace {
        decomp,
        steps,
        iterates,
    })
}

pub fn fom_run(a: &CMat, b: &CMat, m: usize) -> Result<FomTrace> {
    assert_eq!(b.ncols(), 1, "fom_run expects a single right-hand side");
    block_fom_run(a, b, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, identity, real, rng_from_seed};
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

    #[test]
    fn identity_converges_in_one_step() {
        let b = random(4, 1, 1);
        let t = gmres_run(&identity(4), &b, 3).unwrap();
        let norms = &t.residual_norms()[0];
        assert_eq!(norms.len(), 2);
        assert!((norms[0] - b.norm()).abs() < 1e-14);
        assert!(norms[1] < 1e-14);
        let f = fom_run(&identity(4), &b, 3).unwrap();
        assert!((f.iterates[0].as_ref().unwrap() - &b).norm() < 1e-14);
    }

    #[test]
    fn recorded_norms_match_true_residuals() {
        let a = random(8, 8, 5) + identity(8) * real(4.0);
        let b = random(8, 1, 6);
        for j in 1..=6 {
            let t = gmres_run(&a, &b, j).unwrap();
            let c = &t.cycles[0];
            let true_r = (&b - &a * &c.x).norm();
            assert!((c.norms()[j] - true_r).abs() <= 1e-10 * true_r.max(1e-300));
        }
    }

    #[test]
    fn residual_norms_non_increasing() {
        let a = random(9, 9, 7);
        let b = random(9, 1, 8);
        let t = gmres_run(&a, &b, 9).unwrap();
        for w in t.residual_norms()[0].windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn restart_boundary_is_exact() {
        let a = random(10, 10, 9) + identity(10) * real(3.0);
        let b = random(10, 1, 10);
        let t = restarted_gmres(&a, &b, 3, 3).unwrap();
        assert_eq!(t.cycles.len(), 3);
        for k in 0..2 {
            let end = t.cycles[k].residuals.last().unwrap();
            assert_eq!(end, &t.cycles[k + 1].residuals[0]);
        }
        let one = gmres_run(&a, &b, 3).unwrap();
        assert_eq!(
            one.residual_norms()[0],
            restarted_gmres(&a, &b, 3, 1).unwrap().residual_norms()[0]
        );
    }

    #[test]
    fn hpd_fom_always_exists() {
        let g = random(6, 6, 11);
        let a = g.adjoint() * &g + identity(6);
        let f = fom_run(&a, &random(6, 1, 12), 6).unwrap();
        assert!(f.steps.iter().all(|s| s.exists));
    }

    #[test]
    fn block_identity_and_start() {
        let b = random(6, 2, 13);
        let t = block_gmres_run(&identity(6), &b, 2).unwrap();
        let c = &t.cycles[0];
        assert!((c.residuals[0].gram() - b.adjoint() * &b).norm() < 1e-12 * b.norm_squared());
        assert!(c.residuals[1].frobenius() < 1e-13);
    }

    #[test]
    fn block_grams_loewner_non_increasing() {
        let a = random(12, 12, 14) + identity(12) * real(2.0);
        let b = random(12, 2, 15);
        let t = restarted_block_gmres(&a, &b, 3, 2).unwrap();
        for c in &t.cycles {
            let g = c.grams();
            for w in g.windows(2) {
                let (vals, _) = crate::linalg::hermitian_eig(&(&w[0] - &w[1]));
                assert!(vals[0] >= -1e-10 * w[0].norm());
            }
        }
    }
}

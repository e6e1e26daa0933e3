use crate::block::{blnorm, NormalizingQuantity};
use crate::block_prescribe::{BlockPrescription, BlockRestartedConstruction};
use crate::krylov::{gmres_run, restarted_block_gmres, RunTrace};
use crate::linalg::{block, eig, inverse, multiset_distance, random_unitary, CMat, C64};
use crate::prescribe::{
    krylov_rank, Assembly, FullConstruction, FullPrescription, RestartedConstruction,
    ScalarPrescription,
};

use super::theorems::{check_mirroring, check_peak_plateau, check_rank};
use super::{Check, VerificationReport, VerifyOptions, Worst, COND_REFUSE, COND_WARN, WIDE_TOL};

/// Per-cycle data a restarted construction is checked against.
struct Expected {
    /// `F_0..F_{m-1}` of every cycle.
    values: Vec<Vec<NormalizingQuantity>>,
    /// Transition values of all cycles but the last.
    transitions: Vec<NormalizingQuantity>,
    /// Ritz values (latent roots in the block case) for steps `1..=m`.
    ritz: Vec<Vec<Vec<C64>>>,
}

/// Per-cycle factor data produced by the construction.
struct FactorData {
    cond_du: Vec<f64>,
    reconstruction: Vec<f64>,
    /// `blnorm(G)` against the transition value.
    g: Vec<(NormalizingQuantity, NormalizingQuantity)>,
}

fn rel(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Effective tolerance: widened under a conditioning warning.
fn effective_tol(opts: &VerifyOptions, conds: &[f64], rep: &mut VerificationReport) -> f64 {
    let mut tol = opts.tolerance;
    for (k, &c) in conds.iter().enumerate() {
        if c > COND_WARN {
            rep.warnings.push(format!(
                "cycle {}: cond(DU) = {c:.3e} exceeds {COND_WARN:e}; tolerance widened",
                k + 1
            ));
            tol = tol.max(WIDE_TOL);
        }
    }
    tol
}

fn run_trace(
    rep: &mut VerificationReport,
    a: &CMat,
    b: &CMat,
    m: usize,
    cycles: usize,
) -> Option<RunTrace> {
    match restarted_block_gmres(a, b, m, cycles) {
        Ok(t) => {
            rep.warnings.extend(t.warnings.iter().cloned());
            Some(t)
        }
        Err(e) => {
            rep.push(Check::failed(
                "residual_trace",
                format!("GMRES re-run failed: {e}"),
            ));
            None
        }
    }
}

fn verify_restarted(
    scenario: &str,
    asm: &Assembly,
    exp: &Expected,
    fd: &FactorData,
    opts: &VerifyOptions,
) -> VerificationReport {
    let mut rep = VerificationReport::new(scenario);
    let tol = effective_tol(opts, &fd.cond_du, &mut rep);
    let tight = tol * 1e-2;
    let (m, cycles, p) = (asm.m, asm.cycles, asm.p);
    let has_tail = asm.tail.iter().any(|z| *z != C64::new(0.0, 0.0));

    let cond_v = asm.cond_v();
    rep.push(Check::measured(
        "conditioning",
        cond_v,
        COND_REFUSE,
        format!(
            "cond(V~) = {cond_v:.3e}; max cond(DU) = {:.3e}",
            fd.cond_du.iter().cloned().fold(0.0, f64::max)
        ),
    ));

    let Some(trace) = run_trace(&mut rep, &asm.a, &asm.b, m, cycles) else {
        return rep;
    };
    if trace.cycles.len() != cycles || trace.cycles.iter().any(|c| c.steps() != m) {
        let shape: Vec<usize> = trace.cycles.iter().map(|c| c.steps()).collect();
        rep.push(Check::failed(
            "residual_trace",
            format!("expected {cycles} cycles of {m} steps, got steps {shape:?}"),
        ));
        return rep;
    }

    let amp = amplification(&asm.a, &trace);
    if amp * f64::EPSILON > tight {
        rep.warnings.push(format!(
            "later cycles amplify start perturbations by {amp:.1e}; rounding alone may move the trace by {:.1e}",
            amp * f64::EPSILON
        ));
    }

    // residual trace
    let mut w = Worst::default();
    for k in 0..cycles {
        let got = &trace.cycles[k].residuals;
        for j in 0..m {
            w.update(
                rel(got[j].matrix(), exp.values[k][j].matrix()),
                tol,
                format!("cycle {} step {j}", k + 1),
            );
        }
        if k + 1 < cycles {
            w.update(
                rel(got[m].matrix(), exp.transitions[k].matrix()),
                tol,
                format!("cycle {} step {m}", k + 1),
            );
        }
    }
    rep.push(w.into_check("residual_trace", tol));

    // final residual against the closed form
    let last = &trace.cycles[cycles - 1];
    let check = match asm.final_residual_formula(&last.x) {
        Ok(formula) => {
            let dev = (&last.r_end - formula).norm() / asm.b.norm();
            Check::measured(
                "final_residual",
                dev,
                tol,
                format!("||R_final|| = {:.3e}", last.r_end.norm()),
            )
        }
        Err(e) => Check::failed("final_residual", e.to_string()),
    };
    rep.push(check);

    // Ritz values
    let mut w = Worst::default();
    for k in 0..cycles {
        for j in 1..=m {
            if has_tail && k + 1 == cycles && j == m {
                continue;
            }
            let dev = multiset_distance(&trace.cycles[k].ritz[j - 1], &exp.ritz[k][j - 1]);
            w.update(dev, tol, format!("cycle {} step {j}", k + 1));
        }
    }
    rep.push(w.into_check("ritz", tol));

    // eigenvalues
    let reference = if has_tail {
        eig(&asm.h_with_tail())
    } else {
        asm.eigenvalues_from_blocks()
    };
    let check = match (eig(&asm.a), reference) {
        (Ok(got), Ok(want)) => Check::measured(
            "eigenvalues",
            multiset_distance(&got, &want),
            tol,
            if has_tail {
                "against eig of the tailed Hessenberg"
            } else {
                "against the diagonal-block spectra"
            },
        ),
        (Err(e), _) | (_, Err(e)) => Check::failed("eigenvalues", e.to_string()),
    };
    rep.push(check);

    // coupling of consecutive cycles: 1 - cos of the largest principal angle
    // between the next first basis block and the normalized residual
    let bases = asm.bases();
    let mut w = Worst::default();
    for k in 0..cycles - 1 {
        let r = &trace.cycles[k].r_end;
        let dev = match inverse(blnorm(r).matrix()) {
            Ok(finv) => {
                let overlap = block(&bases[k + 1], 0, 0, asm.n(), p).adjoint() * r * finv;
                let cos = overlap.singular_values().min();
                (1.0 - cos).abs()
            }
            Err(_) => f64::INFINITY,
        };
        w.update(dev, tight, format!("cycles {}-{}", k + 1, k + 2));
    }
    if cycles == 1 {
        w.at = "single cycle".into();
    }
    rep.push(w.into_check("cycle_coupling", tight));

    let mut w = Worst::default();
    for (k, (got, want)) in fd.g.iter().enumerate() {
        w.update(
            rel(got.matrix(), want.matrix()),
            tight,
            format!("cycle {}", k + 1),
        );
    }
    if fd.g.is_empty() {
        w.at = "single cycle".into();
    }
    rep.push(w.into_check("g_norm", tight));

    let mut w = Worst::default();
    for (k, &r) in fd.reconstruction.iter().enumerate() {
        w.update(r, tight, format!("cycle {}", k + 1));
    }
    rep.push(w.into_check("factor_reconstruction", tight));

    let rr = asm.relation_residual();
    rep.push(Check::measured(
        "arnoldi_relation",
        rr,
        tight,
        "||A V~ - V~ H~(C)|| / ||A||",
    ));
    push_theorems(&mut rep, &asm.a, &trace);
    rep
}

/// Mirroring, peak-plateau and rank checks on a re-run trace.
fn push_theorems(rep: &mut VerificationReport, a: &CMat, trace: &RunTrace) {
    rep.push(check_mirroring(trace).to_check());
    rep.push(check_peak_plateau(trace).to_check());
    rep.push(check_rank(trace, &krylov_rank(a, trace)));
}

/// Scalar restarted construction against its prescription.
pub fn verify_scalar(
    c: &RestartedConstruction,
    p: &ScalarPrescription,
    opts: &VerifyOptions,
) -> VerificationReport {
    let one =
        |v: f64| NormalizingQuantity::from_qr_factor(CMat::from_element(1, 1, C64::new(v, 0.0)));
    let exp = Expected {
        values: p
            .residuals
            .iter()
            .map(|c| c.iter().map(|&v| one(v)).collect())
            .collect(),
        transitions: (0..p.cycles.saturating_sub(1))
            .map(|k| one(p.transition(k)))
            .collect(),
        ritz: p.ritz.clone(),
    };
    let fd = FactorData {
        cond_du: c.factors.iter().map(|f| f.factor.cond_du).collect(),
        reconstruction: c
            .factors
            .iter()
            .map(|f| f.factor.reconstruction_residual())
            .collect(),
        g: c.factors
            .iter()
            .take(p.cycles.saturating_sub(1))
            .map(|f| (one(f.g.norm()), one(f.transition)))
            .collect(),
    };
    verify_restarted("restarted_gmres", &c.assembly, &exp, &fd, opts)
}

/// Block restarted construction against its prescription.
pub fn verify_block(
    c: &BlockRestartedConstruction,
    p: &BlockPrescription,
    opts: &VerifyOptions,
) -> VerificationReport {
    let mut ritz = Vec::with_capacity(p.cycles);
    let mut rep_err = None;
    for cyc in &p.ritz {
        let mut per = Vec::with_capacity(p.m);
        for r in cyc {
            match r.latent_roots() {
                Ok(v) => per.push(v),
                Err(e) => {
                    rep_err.get_or_insert(e.to_string());
                    per.push(Vec::new());
                }
            }
        }
        ritz.push(per);
    }
    let exp = Expected {
        values: p.residuals.clone(),
        transitions: (0..p.cycles.saturating_sub(1))
            .map(|k| p.transition(k))
            .collect(),
        ritz,
    };
    let fd = FactorData {
        cond_du: c.factors.iter().map(|f| f.factor.cond_du).collect(),
        reconstruction: c
            .factors
            .iter()
            .map(|f| f.factor.reconstruction_residual())
            .collect(),
        g: c.factors
            .iter()
            .take(p.cycles.saturating_sub(1))
            .map(|f| (blnorm(&f.g), f.transition.clone()))
            .collect(),
    };
    let mut rep = verify_restarted("restarted_block_gmres", &c.assembly, &exp, &fd, opts);
    if let Some(e) = rep_err {
        rep.push(Check::failed("ritz_input", e));
    }
    rep
}

/// Full GMRES construction against its prescription.
pub fn verify_full(
    c: &FullConstruction,
    p: &FullPrescription,
    opts: &VerifyOptions,
) -> VerificationReport {
    let mut rep = VerificationReport::new("gmres");
    let tol = effective_tol(opts, &[c.factor.cond_du], &mut rep);
    let tight = tol * 1e-2;
    let n = p.n();
    let trace = match gmres_run(&c.a, &c.b, n) {
        Ok(t) => t,
        Err(e) => {
            rep.push(Check::failed(
                "residual_trace",
                format!("GMRES re-run failed: {e}"),
            ));
            return rep;
        }
    };
    let cyc = &trace.cycles[0];
    let f = cyc.norms();
    let mut w = Worst::default();
    for j in 0..n {
        let dev = match f.get(j) {
            Some(&v) => (v - p.residuals[j]).abs() / p.residuals[j],
            None => f64::INFINITY,
        };
        w.update(dev, tol, format!("step {j}"));
    }
    rep.push(w.into_check("residual_trace", tol));

    let fin = f.last().copied().unwrap_or(f64::INFINITY);
    let done = cyc.steps() == n;
    rep.push(Check::measured(
        "final_residual",
        if done {
            fin / p.residuals[0]
        } else {
            f64::INFINITY
        },
        tol,
        format!("{} steps, final residual {fin:.3e}", cyc.steps()),
    ));

    let mut w = Worst::default();
    for j in 1..n {
        let dev = cyc
            .ritz
            .get(j - 1)
            .map_or(f64::INFINITY, |r| multiset_distance(r, &p.ritz[j - 1]));
        w.update(dev, tol, format!("step {j}"));
    }
    rep.push(w.into_check("ritz", tol));

    let check = match eig(&c.a) {
        Ok(vals) => Check::measured(
            "eigenvalues",
            multiset_distance(&vals, &p.eigenvalues),
            tol,
            "against the prescribed spectrum",
        ),
        Err(e) => Check::failed("eigenvalues", e.to_string()),
    };
    rep.push(check);

    rep.push(Check::measured(
        "factor_reconstruction",
        c.factor.reconstruction_residual(),
        tight,
        "||DUCU^{-1}D^{-1} - H||",
    ));
    let rr = (&c.a * &c.v - &c.v * &c.factor.h).norm() / c.a.norm();
    rep.push(Check::measured(
        "arnoldi_relation",
        rr,
        tight,
        "||A V - V H|| / ||A||",
    ));
    push_theorems(&mut rep, &c.a, &trace);
    rep
}

/// Relative perturbation used to probe the restart chain.
const PROBE: f64 = 1e-10;

/// How much the residual history of cycles `k..` magnifies a relative
/// perturbation of the start of cycle `k`, maximized over `k >= 1`.
///
/// Rounding in one cycle enters the next one as such a perturbation, so
/// `amplification * eps` estimates the attainable trace accuracy. The nominal
/// zero at the end of the last cycle is left out.
pub(crate) fn amplification(a: &CMat, trace: &RunTrace) -> f64 {
    let (m, p) = (trace.m, trace.p);
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for k in 1..trace.cycles.len() {
        let r0 = &trace.cycles[k].r_start;
        let dir = block(&random_unitary(n, 0x5eed + k as u64), 0, 0, n, p);
        let bumped = r0 + dir * C64::new(PROBE * r0.norm(), 0.0);
        let rest = trace.cycles.len() - k;
        let (Ok(t0), Ok(t1)) = (
            restarted_block_gmres(a, r0, m, rest),
            restarted_block_gmres(a, &bumped, m, rest),
        ) else {
            continue;
        };
        for (i, (c0, c1)) in t0.cycles.iter().zip(&t1.cycles).enumerate() {
            let last = if i + 1 == rest {
                c0.steps()
            } else {
                c0.steps() + 1
            };
            for j in 0..last.min(c0.residuals.len()).min(c1.residuals.len()) {
                let (f0, f1) = (c0.residuals[j].frobenius(), c1.residuals[j].frobenius());
                worst = worst.max((f1 - f0).abs() / f0.max(f64::MIN_POSITIVE) / PROBE);
            }
        }
    }
    worst
}

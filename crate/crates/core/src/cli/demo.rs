//! Built-in end-to-end scenarios.

use std::fmt::Write as _;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::block_prescribe::construct_restarted_block;
use crate::krylov::{
    restarted_block_gmres, restarted_gmres, stagnation_steps, RunTrace, StagnationKind,
};
use crate::linalg::{c64, rng_from_seed, C64};
use crate::prescribe::{construct_restarted, restarted_krylov_matrix};
use crate::scenarios::{
    block_directional_stagnation, engineered_stagnation, random_block, random_restarted,
};
use crate::verify::{
    check_mirroring, check_peak_plateau, check_rank, verify_scalar, Check, VerificationReport,
    VerifyOptions,
};

use super::build::Built;
use super::scenario::Scenario;
use super::{artifacts, create_dir, mtx, residual_csv, write_file, CliError};

pub const DEMOS: [&str; 5] = [
    "mirroring",
    "peak-plateau",
    "rank-one-tail",
    "block-directional-stagnation",
    "rank-deficiency",
];

#[derive(Clone, Debug)]
pub struct DemoOutcome {
    pub name: String,
    pub summary: String,
    pub pass: bool,
}

pub fn run_demo(name: &str, dir: &Path) -> Result<DemoOutcome, CliError> {
    let mut s = format!("== {name} ==\n");
    let report = match name {
        "mirroring" => mirroring(dir, &mut s)?,
        "peak-plateau" => peak_plateau(dir, &mut s)?,
        "rank-one-tail" => rank_one_tail(dir, &mut s)?,
        "block-directional-stagnation" => block_directional(dir, &mut s)?,
        "rank-deficiency" => rank_deficiency(dir, &mut s)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown demo `{other}`; available: {}",
                DEMOS.join(", ")
            )))
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_file(&dir.join("report.json"), &json)?;
    let failed = report.failures();
    if failed.is_empty() {
        let _ = writeln!(s, "verdict: pass ({} checks)", report.checks.len());
    } else {
        let _ = writeln!(s, "verdict: FAIL ({})", failed.join(", "));
    }
    Ok(DemoOutcome {
        name: name.into(),
        summary: s,
        pass: report.pass,
    })
}

fn renamed(mut c: Check, name: &str) -> Check {
    c.name = name.into();
    c
}

fn values(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.6}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_trace(s: &mut String, t: &RunTrace) {
    for (k, n) in t.residual_norms().iter().enumerate() {
        let _ = writeln!(s, "  cycle {}: {}", k + 1, values(n));
    }
}

fn write_run(dir: &Path, t: &RunTrace, block: bool) -> Result<(), CliError> {
    write_file(&dir.join("residuals.csv"), &residual_csv(t, block)?)
}

fn mirroring(dir: &Path, s: &mut String) -> Result<VerificationReport, CliError> {
    let e = engineered_stagnation(1)?;
    let sc = Scenario::from_full(&e.prescription, None);
    let built = Built::Full(e.construction.clone());
    artifacts::write_construction(dir, &sc, &built)?;
    let t = restarted_gmres(built.a(), built.b(), e.m, e.cycles())?;
    write_run(dir, &t, false)?;
    let _ = writeln!(
        s,
        "full GMRES prescription f = ({}), restart length {}",
        values(&e.prescription.residuals),
        e.m
    );
    print_trace(s, &t);
    let mirror = check_mirroring(&t);
    for ev in &mirror.events {
        let _ = writeln!(
            s,
            "  cycle {} ends with {} flat step(s); cycle {} starts flat: ({})",
            ev.cycle,
            ev.s,
            ev.cycle + 1,
            ev.next_start
                .iter()
                .map(|x| format!("{x:.6}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    let mut rep = built.verify(
        &super::Prescription::Full(e.prescription.clone()),
        &VerifyOptions::default(),
    );
    rep.scenario = "mirroring".into();
    rep.push(Check::flag(
        "stagnation_present",
        !mirror.events.is_empty(),
        "engineered flat tail detected",
    ));
    rep.push(renamed(mirror.to_check(), "restarted_mirroring"));
    rep.push(renamed(
        check_rank(
            &t,
            &restarted_krylov_matrix(built.a(), built.b(), e.m, e.cycles())?,
        ),
        "restarted_rank",
    ));
    Ok(rep)
}

fn peak_plateau(dir: &Path, s: &mut String) -> Result<VerificationReport, CliError> {
    let sp = random_restarted(3, 4, 11);
    let c = construct_restarted(&sp)?;
    let sc = Scenario::from_scalar(&sp, None);
    artifacts::write_construction(dir, &sc, &Built::Scalar(c.clone()))?;
    let t = restarted_gmres(c.a(), c.b(), 3, 4)?;
    write_run(dir, &t, false)?;
    let pp = check_peak_plateau(&t);
    let _ = writeln!(s, "  cycle step  |v*r_m|/||r_m||   ||r_m||/||r_F||");
    for r in &pp.rows {
        let _ = writeln!(
            s,
            "  {:>5} {:>4}  {:>15.9e}  {:>15.9e}",
            r.cycle, r.step, r.lhs, r.rhs
        );
    }
    let _ = writeln!(
        s,
        "  scalar: max relative deviation {:.3e} over {} steps",
        pp.max_deviation, pp.checked
    );
    let bp = random_block(2, 2, 3, 11);
    let bc = construct_restarted_block(&bp)?;
    let bt = restarted_block_gmres(bc.a(), bc.b(), 2, 3)?;
    let bpp = check_peak_plateau(&bt);
    let _ = writeln!(
        s,
        "  block p = 2: max Gram deviation {:.3e} over {} steps",
        bpp.max_deviation, bpp.checked
    );
    let mut rep = verify_scalar(&c, &sp, &VerifyOptions::default());
    rep.scenario = "peak-plateau".into();
    rep.push(renamed(bpp.to_check(), "block_peak_plateau"));
    Ok(rep)
}

fn rank_one_tail(dir: &Path, s: &mut String) -> Result<VerificationReport, CliError> {
    let mut sp = random_restarted(3, 4, 5);
    let base = construct_restarted(&sp)?;
    let n = sp.n();
    let mut rng = rng_from_seed(99);
    let c_hat: Vec<C64> = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            c64(0.3 * re, 0.3 * im)
        })
        .collect();
    let tailed = base.tail_rank_one(&c_hat)?;
    sp.tail = Some(c_hat);
    let sc = Scenario::from_scalar(&sp, None);
    artifacts::write_construction(dir, &sc, &Built::Scalar(tailed.clone()))?;
    let t0 = restarted_gmres(base.a(), base.b(), 3, 4)?;
    let t1 = restarted_gmres(tailed.a(), tailed.b(), 3, 4)?;
    write_run(dir, &t1, false)?;
    let (n0, n1) = (t0.residual_norms(), t1.residual_norms());
    let mut prefix: f64 = 0.0;
    for k in 0..n0.len() {
        let upto = if k + 1 == n0.len() {
            n0[k].len() - 1
        } else {
            n0[k].len()
        };
        for j in 0..upto {
            prefix = prefix.max((n1[k][j] - n0[k][j]).abs() / n0[k][j]);
        }
    }
    let last = t1.cycles.last().expect("four cycles");
    let formula = tailed.assembly.final_residual_formula(&last.x)?;
    let closed = (&last.r_end - &formula).norm() / tailed.b().norm();
    let f0 = *n0.last().and_then(|c| c.last()).expect("nonempty");
    let f1 = *n1.last().and_then(|c| c.last()).expect("nonempty");
    let _ = writeln!(
        s,
        "  prescribed residual values: max relative change {prefix:.3e}"
    );
    let _ = writeln!(
        s,
        "  final residual: without tail {f0:.6e}, with tail {f1:.6e}"
    );
    let _ = writeln!(s, "  final residual against the closed form: {closed:.3e}");
    let mut rep = verify_scalar(&tailed, &sp, &VerifyOptions::default());
    rep.scenario = "rank-one-tail".into();
    rep.push(Check::measured(
        "unchanged_prefix",
        prefix,
        1e-10,
        "relative change of prescribed values",
    ));
    rep.push(Check::measured(
        "closed_form_final",
        closed,
        1e-10,
        "final residual against the closed form",
    ));
    Ok(rep)
}

fn block_directional(dir: &Path, s: &mut String) -> Result<VerificationReport, CliError> {
    let (a, b, m) = block_directional_stagnation()?;
    create_dir(dir)?;
    mtx::write(&dir.join("A.mtx"), &a)?;
    mtx::write(&dir.join("B.mtx"), &b)?;
    let t = restarted_block_gmres(&a, &b, m, 2)?;
    write_run(dir, &t, true)?;
    let _ = writeln!(
        s,
        "decoupled system A1 (+) A2, B = [b1 (+) 0, 0 (+) b2], M = {m}, 2 cycles"
    );
    print_trace(s, &t);
    let mut partial_e1 = false;
    for st in stagnation_steps(&t) {
        match &st.kind {
            StagnationKind::Total => {
                let _ = writeln!(
                    s,
                    "  cycle {} step {}: total stagnation",
                    st.cycle + 1,
                    st.step
                );
            }
            StagnationKind::Partial { direction } => {
                let u: Vec<String> = direction
                    .iter()
                    .map(|z| format!("{:.3}", z.norm()))
                    .collect();
                let _ = writeln!(
                    s,
                    "  cycle {} step {}: partial stagnation along |u| = ({})",
                    st.cycle + 1,
                    st.step,
                    u.join(", ")
                );
                partial_e1 |= direction[0].norm() > 1.0 - 1e-8;
            }
        }
    }
    let mirror = check_mirroring(&t);
    let mut rep = VerificationReport::new("block-directional-stagnation");
    rep.push(Check::flag(
        "partial_stagnation_along_e1",
        partial_e1,
        "stagnation direction of the decoupled system",
    ));
    rep.push(mirror.to_check());
    rep.push(check_peak_plateau(&t).to_check());
    rep.push(check_rank(&t, &restarted_krylov_matrix(&a, &b, m, 2)?));
    Ok(rep)
}

fn rank_deficiency(dir: &Path, s: &mut String) -> Result<VerificationReport, CliError> {
    let e = engineered_stagnation(2)?;
    let sc = Scenario::from_full(&e.prescription, None);
    let built = Built::Full(e.construction.clone());
    artifacts::write_construction(dir, &sc, &built)?;
    let t = restarted_gmres(built.a(), built.b(), e.m, e.cycles())?;
    write_run(dir, &t, false)?;
    let rk = restarted_krylov_matrix(built.a(), built.b(), e.m, e.cycles())?;
    let _ = writeln!(
        s,
        "stagnating system (n = {}, m = {}):",
        built.a().nrows(),
        e.m
    );
    print_trace(s, &t);
    let _ = writeln!(
        s,
        "  rank of the restarted Krylov matrix: {} of {}",
        rk.rank,
        rk.k.nrows()
    );

    let sp = random_restarted(3, 2, 3);
    let c = construct_restarted(&sp)?;
    let t2 = restarted_gmres(c.a(), c.b(), 3, 2)?;
    let rk2 = restarted_krylov_matrix(c.a(), c.b(), 3, 2)?;
    let _ = writeln!(s, "strictly decreasing system (n = {}, m = 3):", sp.n());
    print_trace(s, &t2);
    let _ = writeln!(
        s,
        "  rank of the restarted Krylov matrix: {} of {}",
        rk2.rank,
        rk2.k.nrows()
    );

    let mut rep = VerificationReport::new("rank-deficiency");
    rep.push(Check::flag(
        "stagnating_is_deficient",
        !rk.full_rank,
        format!("rank {}", rk.rank),
    ));
    rep.push(renamed(check_rank(&t, &rk), "rank_stagnating"));
    rep.push(Check::flag(
        "decreasing_is_full",
        rk2.full_rank,
        format!("rank {}", rk2.rank),
    ));
    rep.push(renamed(check_rank(&t2, &rk2), "rank_decreasing"));
    let v = verify_scalar(&c, &sp, &VerifyOptions::default());
    rep.push(Check::flag(
        "decreasing_construction",
        v.pass,
        format!("failing: {:?}", v.failures()),
    ));
    Ok(rep)
}

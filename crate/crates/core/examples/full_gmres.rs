//! Build a 4x4 matrix whose full GMRES run has chosen residual norms, Ritz
//! values and spectrum, then check it.

use krylov_prescribe::krylov::gmres_run;
use krylov_prescribe::linalg::{c64, real};
use krylov_prescribe::prescribe::{construct_full_gmres, Basis, FullPrescription};
use krylov_prescribe::verify::{verify_full, VerifyOptions};

fn main() -> krylov_prescribe::Result<()> {
    let p = FullPrescription {
        residuals: vec![1.0, 0.8, 0.3, 0.05],
        ritz: vec![
            vec![real(2.0)],
            vec![c64(1.0, 1.0), c64(1.0, -1.0)],
            vec![real(0.7), real(1.2), real(1.9)],
        ],
        eigenvalues: vec![real(0.5), real(1.0), c64(0.0, 1.5), real(2.0)],
        basis: Basis::RandomUnitary { seed: 7 },
    };
    let con = construct_full_gmres(&p)?;
    let run = gmres_run(&con.a, &con.b, 4)?;
    for (j, f) in run.cycles[0].norms().iter().enumerate() {
        println!("step {j}: ||r|| = {f:.12}");
    }
    let report = verify_full(&con, &p, &VerifyOptions::default());
    for c in &report.checks {
        println!(
            "{:<22} {} ({:.1e})",
            c.name,
            if c.pass { "ok" } else { "FAIL" },
            c.deviation
        );
    }
    Ok(())
}

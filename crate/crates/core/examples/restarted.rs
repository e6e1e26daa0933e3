//! Restarted GMRES(3) with four cycles: residual norms, Ritz values and the
//! spectra of the cycle Hessenberg matrices are all prescribed.

use krylov_prescribe::krylov::restarted_gmres;
use krylov_prescribe::prescribe::construct_restarted;
use krylov_prescribe::scenarios::random_restarted;
use krylov_prescribe::verify::{verify_scalar, VerifyOptions};

fn main() -> krylov_prescribe::Result<()> {
    let sp = random_restarted(3, 4, 11);
    let con = construct_restarted(&sp)?;
    println!(
        "n = {}, cond(V~) = {:.2e}",
        con.a().nrows(),
        con.assembly.cond_v()
    );

    let trace = restarted_gmres(con.a(), con.b(), 3, 4)?;
    for (k, c) in trace.cycles.iter().enumerate() {
        let got: Vec<String> = c.norms().iter().map(|f| format!("{f:.6}")).collect();
        println!("cycle {}: {}", k + 1, got.join("  "));
    }
    println!("asked for: {:?}", sp.residuals);

    let rep = verify_scalar(&con, &sp, &VerifyOptions::default());
    println!("verified: {} (failures: {:?})", rep.pass, rep.failures());
    Ok(())
}

//! Block GMRES with two right-hand sides: each residual is described by the
//! upper triangular factor of `R^* R`, and the whole sequence is prescribed.

use krylov_prescribe::block_prescribe::construct_restarted_block;
use krylov_prescribe::krylov::restarted_block_gmres;
use krylov_prescribe::scenarios::random_block;
use krylov_prescribe::verify::{verify_block, VerifyOptions};

fn main() -> krylov_prescribe::Result<()> {
    let bp = random_block(2, 2, 3, 3);
    let con = construct_restarted_block(&bp)?;
    let trace = restarted_block_gmres(con.a(), con.b(), 2, 3)?;
    for (k, c) in trace.cycles.iter().enumerate() {
        for (j, r) in c.residuals.iter().enumerate() {
            let f = r.matrix();
            println!(
                "cycle {} step {j}: [{:.5} {:.5}{:+.5}i; 0 {:.5}]",
                k + 1,
                f[(0, 0)].re,
                f[(0, 1)].re,
                f[(0, 1)].im,
                f[(1, 1)].re
            );
        }
    }
    let rep = verify_block(&con, &bp, &VerifyOptions::default());
    println!("verified: {}", rep.pass);
    Ok(())
}

//! Changing the last column of the assembled Hessenberg matrix moves only the
//! final residual; everything prescribed before it stays put.

use krylov_prescribe::krylov::restarted_gmres;
use krylov_prescribe::linalg::c64;
use krylov_prescribe::prescribe::construct_restarted;
use krylov_prescribe::scenarios::random_restarted;

fn main() -> krylov_prescribe::Result<()> {
    let sp = random_restarted(3, 3, 2);
    let base = construct_restarted(&sp)?;
    let n = sp.n();
    for scale in [0.0, 0.1, 1.0] {
        let c_hat: Vec<_> = (0..n)
            .map(|i| c64(scale * (i as f64 - 4.0) / 4.0, scale * 0.2))
            .collect();
        let con = base.tail_rank_one(&c_hat)?;
        let trace = restarted_gmres(con.a(), con.b(), 3, 3)?;
        let last = trace.cycles.last().unwrap();
        let formula = con.assembly.final_residual_formula(&last.x)?;
        println!(
            "|c_hat| scale {scale:>4}: last cycle {:?}, closed form off by {:.1e}",
            last.norms()
                .iter()
                .map(|f| format!("{f:.3e}"))
                .collect::<Vec<_>>(),
            (&last.r_end - formula).norm()
        );
    }
    Ok(())
}

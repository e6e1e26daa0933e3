//! The restarted Krylov matrix loses rank exactly when a cycle other than the
//! last ends in stagnation.

use krylov_prescribe::krylov::restarted_gmres;
use krylov_prescribe::prescribe::{construct_restarted, restarted_krylov_matrix};
use krylov_prescribe::scenarios::{engineered_stagnation, random_restarted};
use krylov_prescribe::verify::check_rank;

fn main() -> krylov_prescribe::Result<()> {
    let sp = random_restarted(3, 2, 5);
    let con = construct_restarted(&sp)?;
    let rk = restarted_krylov_matrix(con.a(), con.b(), 3, 2)?;
    println!(
        "strictly decreasing: rank {} of {} (min ratio {:.1e})",
        rk.rank,
        rk.k.nrows(),
        rk.min_ratio
    );

    let e = engineered_stagnation(2)?;
    let (a, b) = (&e.construction.a, &e.construction.b);
    let rk = restarted_krylov_matrix(a, b, e.m, e.cycles())?;
    println!(
        "plateau ending cycle 1: rank {} of {}",
        rk.rank,
        rk.k.nrows()
    );
    let check = check_rank(&restarted_gmres(a, b, e.m, e.cycles())?, &rk);
    println!("{}", check.detail);
    Ok(())
}

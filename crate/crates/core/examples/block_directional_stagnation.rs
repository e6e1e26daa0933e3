//! Block GMRES can stall along a single direction while still reducing the
//! residual elsewhere. The Gram difference between steps is then singular.

use krylov_prescribe::block_prescribe::{
    detect_direction_stagnation, restarted_block_krylov_matrix,
};
use krylov_prescribe::krylov::restarted_block_gmres;
use krylov_prescribe::scenarios::block_directional_stagnation;

fn main() -> krylov_prescribe::Result<()> {
    let (a, b, m) = block_directional_stagnation()?;
    let trace = restarted_block_gmres(&a, &b, m, 2)?;
    let rep = detect_direction_stagnation(&trace);
    for s in &rep.steps {
        match s.direction() {
            Some(u) => println!(
                "cycle {} step {}: flat along [{:.3}, {:.3}]",
                s.cycle + 1,
                s.step,
                u[0].norm(),
                u[1].norm()
            ),
            None => println!(
                "cycle {} step {}: flat in every direction",
                s.cycle + 1,
                s.step
            ),
        }
    }
    let rank = restarted_block_krylov_matrix(&a, &b, m, 2)?;
    println!(
        "restarted Krylov matrix: rank {} of {}",
        rank.rank,
        a.nrows()
    );
    Ok(())
}

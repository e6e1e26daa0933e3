//! The last residual of a cycle seen through the Arnoldi basis: each
//! component is inversely proportional to the matching FOM residual norm.

use krylov_prescribe::krylov::restarted_gmres;
use krylov_prescribe::linalg::{c64, CMat};
use krylov_prescribe::verify::check_peak_plateau;

fn main() -> krylov_prescribe::Result<()> {
    let n = 8;
    let a = CMat::from_fn(n, n, |i, j| match (i as i64 - j as i64).abs() {
        0 => c64(2.0 + 0.1 * i as f64, 0.0),
        1 => c64(-0.8, 0.3),
        _ => c64(0.05 * ((i + 2 * j) % 5) as f64, 0.0),
    });
    let b = CMat::from_fn(n, 1, |i, _| c64(1.0, 0.1 * i as f64));
    let trace = restarted_gmres(&a, &b, 4, 2)?;
    let rep = check_peak_plateau(&trace);
    println!(
        "{:>5} {:>4} {:>14} {:>14}",
        "cycle", "step", "|v*r|/||r||", "||r||/||r_F||"
    );
    for r in &rep.rows {
        println!(
            "{:>5} {:>4} {:>14.8e} {:>14.8e}",
            r.cycle, r.step, r.lhs, r.rhs
        );
    }
    println!("max deviation {:.1e}, pass {}", rep.max_deviation, rep.pass);
    Ok(())
}

//! A cycle that ends flat makes the next cycle start flat for as many steps.
//! The matrix comes from a full GMRES construction with a plateau at the end
//! of the first cycle.

use krylov_prescribe::krylov::restarted_gmres;
use krylov_prescribe::scenarios::engineered_stagnation;
use krylov_prescribe::verify::check_mirroring;

fn main() -> krylov_prescribe::Result<()> {
    for s in [1, 2] {
        let e = engineered_stagnation(s)?;
        let trace = restarted_gmres(&e.construction.a, &e.construction.b, e.m, e.cycles())?;
        println!("plateau of length {s}, GMRES({}):", e.m);
        for (k, c) in trace.cycles.iter().enumerate() {
            let f: Vec<String> = c.norms().iter().map(|x| format!("{x:.6}")).collect();
            println!("  cycle {}: {}", k + 1, f.join("  "));
        }
        let rep = check_mirroring(&trace);
        for ev in &rep.events {
            println!(
                "  cycle {} ends with {} flat step(s); next start deviation {:.1e}",
                ev.cycle, ev.s, ev.deviation
            );
        }
    }
    Ok(())
}

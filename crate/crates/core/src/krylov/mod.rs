//! Reference solvers used as the verification oracle: Arnoldi, GMRES, FOM,
//! their restarted and block variants.

mod arnoldi;
mod gmres;
mod stagnation;

pub use arnoldi::{arnoldi, block_arnoldi, ritz_per_step, ArnoldiDecomp};
pub use gmres::{
    block_fom_run, block_gmres_run, fom_run, gmres_run, restarted_block_gmres, restarted_gmres,
    CycleTrace, FomStep, FomTrace, RunTrace, FOM_SINGULAR_TOL,
};
pub use stagnation::{
    end_of_cycle_runs, flat_between, stagnation_steps, EndRun, Stagnation, StagnationKind,
    STAGNATION_TOL,
};

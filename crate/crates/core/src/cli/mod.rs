//! Command-line front end: `construct`, `run`, `verify` and `demo`.
//!
//! Exit codes: 0 pass, 1 a verification check failed, 2 usage, parse or
//! admissibility error.

mod artifacts;
mod build;
mod demo;
pub mod mtx;
pub mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

pub use artifacts::{residual_csv, residual_svg};
pub use build::{build, Built};
pub use demo::{run_demo, DemoOutcome, DEMOS};
pub use scenario::{Prescription, Scenario};

use crate::krylov::restarted_block_gmres;
use crate::verify::{VerificationReport, VerifyOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable holding the worker thread count for batch work.
pub const THREADS_ENV: &str = "KRYLOV_PRESCRIBE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Library(#[from] crate::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "krylov-prescribe",
    version,
    about = "Matrices with prescribed (restarted, block) GMRES behavior"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build A and b (or B) from a scenario file.
    Construct {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run (restarted, block) GMRES and write the residual history.
    Run {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        /// Block run; the CSV carries the full residual normalizing quantities.
        #[arg(long)]
        block: bool,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        cycles: usize,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Verify constructions against their scenarios; `--spec`/`--in` may repeat.
    Verify {
        #[arg(long, required = true)]
        spec: Vec<PathBuf>,
        #[arg(long = "in", required = true)]
        input: Vec<PathBuf>,
        #[arg(long)]
        report: PathBuf,
    },
    /// Run a built-in scenario end to end (`all` runs every demo).
    Demo {
        name: String,
        #[arg(long, default_value = "demo-output")]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.exit_code() == 0 {
                let _ = write!(out, "{}", e.render());
                return EXIT_PASS;
            }
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Construct { spec, out: dir } => cmd_construct(spec, dir, out),
        Command::Run {
            matrix,
            rhs,
            block,
            m,
            cycles,
            csv,
            plot,
        } => cmd_run(matrix, rhs, *block, *m, *cycles, csv, plot.as_deref(), out),
        Command::Verify {
            spec,
            input,
            report,
        } => cmd_verify(spec, input, report, out),
        Command::Demo { name, out: dir } => cmd_demo(name, dir, out),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

pub(crate) fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

/// Thread pool sized by `KRYLOV_PRESCRIBE_THREADS` (rayon's default otherwise).
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))
        })?;
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn load(spec: &Path) -> Result<(Scenario, Prescription), CliError> {
    let sc = Scenario::load(spec)?;
    let base = spec.parent().unwrap_or(Path::new("."));
    let p = sc.prescription(base)?;
    Ok((sc, p))
}

/// Constructs from a scenario file and writes the artifacts to `dir`.
/// Nothing is written unless the construction succeeds.
pub fn cmd_construct(spec: &Path, dir: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let (sc, p) = load(spec)?;
    let built = build(&p)?;
    let files = artifacts::write_construction(dir, &sc, &built)?;
    let _ = writeln!(
        out,
        "constructed {} system of dimension {} in {}",
        kind_name(&sc),
        built.a().nrows(),
        dir.display()
    );
    for f in files {
        let _ = writeln!(out, "  {f}");
    }
    Ok(EXIT_PASS)
}

pub(crate) fn kind_name(sc: &Scenario) -> &'static str {
    match sc.kind() {
        scenario::Kind::Gmres => "gmres",
        scenario::Kind::RestartedGmres => "restarted_gmres",
        scenario::Kind::BlockGmres => "block_gmres",
        scenario::Kind::RestartedBlockGmres => "restarted_block_gmres",
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_run(
    matrix: &Path,
    rhs: &Path,
    block: bool,
    m: usize,
    cycles: usize,
    csv: &Path,
    plot: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    if m == 0 || cycles == 0 {
        return Err(CliError::Usage("--m and --cycles must be positive".into()));
    }
    let a = mtx::read(matrix)?;
    let b = mtx::read(rhs)?;
    if !block && b.ncols() != 1 {
        return Err(CliError::Usage(format!(
            "right-hand side has {} columns; pass --block",
            b.ncols()
        )));
    }
    let trace = restarted_block_gmres(&a, &b, m, cycles)?;
    write_file(csv, &residual_csv(&trace, block)?)?;
    if let Some(plot) = plot {
        write_file(plot, &residual_svg(&trace))?;
    }
    for w in &trace.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let last = trace
        .cycles
        .last()
        .and_then(|c| c.norms().last().copied())
        .unwrap_or(0.0);
    let _ = writeln!(
        out,
        "{} cycle(s), final residual {last:.6e}; wrote {}",
        trace.cycles.len(),
        csv.display()
    );
    Ok(EXIT_PASS)
}

/// Verifies one scenario against the matrices stored in `dir`.
pub fn verify_dir(spec: &Path, dir: &Path) -> Result<VerificationReport, CliError> {
    let (sc, p) = load(spec)?;
    let built = build(&p)?;
    let a = mtx::read(&dir.join("A.mtx"))?;
    let b = mtx::read(&dir.join(artifacts::rhs_name(&built)))?;
    if a.shape() != built.a().shape() || b.shape() != built.b().shape() {
        return Err(CliError::Parse(format!(
            "{}: stored system has shape {:?}/{:?}, scenario expects {:?}/{:?}",
            dir.display(),
            a.shape(),
            b.shape(),
            built.a().shape(),
            built.b().shape()
        )));
    }
    let opts = VerifyOptions {
        tolerance: sc.tolerance().unwrap_or(crate::verify::DEFAULT_TOL),
    };
    let mut report = built.with_system(a, b).verify(&p, &opts);
    report.scenario = spec.file_stem().map_or_else(
        || kind_name(&sc).into(),
        |s| s.to_string_lossy().into_owned(),
    );
    Ok(report)
}

pub fn cmd_verify(
    specs: &[PathBuf],
    dirs: &[PathBuf],
    report: &Path,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    if specs.len() != dirs.len() {
        return Err(CliError::Usage(format!(
            "{} --spec but {} --in arguments",
            specs.len(),
            dirs.len()
        )));
    }
    let pool = thread_pool()?;
    let results: Vec<Result<VerificationReport, CliError>> = pool.install(|| {
        specs
            .par_iter()
            .zip(dirs.par_iter())
            .map(|(s, d)| verify_dir(s, d))
            .collect()
    });
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .expect("report serializes");
    write_file(report, &(json + "\n"))?;
    let pass = reports.iter().all(|r| r.pass);
    for r in &reports {
        let failed = r.failures();
        if failed.is_empty() {
            let _ = writeln!(out, "{}: pass ({} checks)", r.scenario, r.checks.len());
        } else {
            let _ = writeln!(out, "{}: FAIL ({})", r.scenario, failed.join(", "));
        }
    }
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

pub fn cmd_demo(name: &str, dir: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let names: Vec<&str> = if name == "all" {
        DEMOS.to_vec()
    } else if DEMOS.contains(&name) {
        vec![name]
    } else {
        let _ = writeln!(
            out,
            "unknown demo `{name}`; available: {}, all",
            DEMOS.join(", ")
        );
        return Ok(EXIT_USAGE);
    };
    let pool = thread_pool()?;
    let results: Vec<Result<DemoOutcome, CliError>> = pool.install(|| {
        names
            .par_iter()
            .map(|n| run_demo(n, &dir.join(n)))
            .collect()
    });
    let mut pass = true;
    for r in results {
        let o = r?;
        let _ = write!(out, "{}", o.summary);
        pass &= o.pass;
    }
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

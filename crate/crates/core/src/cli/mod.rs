//! Drivers behind the `vdflow` binary: single runs, convergence studies and
//! the case listing, with their file outputs and exit codes.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

pub use config::{AssertionMode, RunConfig};
pub use output::{write_errors_csv, write_vtk, DiagnosticsWriter};

use crate::cases::list_cases;
use crate::diagnostics::{check_properties, convergence_orders, error_norms, ErrorRecord, PropertyTolerances, StepDiagnostics};
use crate::error::{Error, Result};
use crate::scheme::{SchemeState, Simulation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_PROPERTY: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::PropertyViolation(_) => EXIT_PROPERTY,
        Error::Singular { .. } | Error::SolveFailed(_) | Error::DegenerateDensity(_) => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub steps: usize,
    pub last: StepDiagnostics,
    /// Violations seen in log mode.
    pub violations: Vec<String>,
    pub snapshots: usize,
}

/// Runs one simulation and writes `diagnostics.csv` and the snapshots into
/// `dir`.
pub fn run_into(cfg: &RunConfig, level: usize, dir: &Path) -> Result<(RunSummary, Simulation, SchemeState)> {
    let case = cfg.case_at(level)?;
    let scheme = cfg.scheme_config(&case);
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
    let mut sim = Simulation::new(case, scheme)?;
    let mut writer = DiagnosticsWriter::create(&dir.join("diagnostics.csv"))?;
    let stride = cfg.output.snapshot_stride;
    let subdivide = cfg.output.subdivide;
    let mode = cfg.assertions.mode;
    let tol = PropertyTolerances::default();
    let mut initial: Option<StepDiagnostics> = None;
    let mut violations = Vec::new();
    let mut snapshots = 0;

    let out = sim.run(&mut |sim: &Simulation, state: &SchemeState, d: &StepDiagnostics| {
        writer.write(d)?;
        if stride > 0 && state.step % stride == 0 {
            let path = dir.join(format!("snapshot_{:04}.vtk", state.step));
            write_vtk(&path, sim.discretization(), state, d.min_density, subdivide)?;
            snapshots += 1;
        }
        let first = *initial.get_or_insert(*d);
        let found = check_properties(d, &first, sim.config().tau, &tol);
        if !found.is_empty() {
            let msg = found.join("; ");
            match mode {
                AssertionMode::Strict => return Err(Error::PropertyViolation(msg)),
                AssertionMode::Log => {
                    log::warn!("step {}: {msg}", state.step);
                    violations.extend(found.into_iter().map(|v| format!("step {}: {v}", state.step)));
                }
            }
        }
        Ok(())
    });
    let out = out?;
    writer.finish()?;
    let last = *out.diagnostics.last().expect("a run records its initial state");
    Ok((
        RunSummary {
            output_dir: dir.to_path_buf(),
            steps: out.state.step,
            last,
            violations,
            snapshots,
        },
        sim,
        out.state,
    ))
}

pub fn run_case(cfg: &RunConfig) -> Result<RunSummary> {
    run_into(cfg, cfg.case.level, &cfg.output.directory).map(|(s, _, _)| s)
}

/// Runs every configured level of a case with an exact solution and writes
/// `errors.csv`; each level's diagnostics go to `level_<k>/`.
pub fn run_convergence(cfg: &RunConfig) -> Result<(Vec<ErrorRecord>, Vec<[f64; 3]>)> {
    if cfg.case.tau.is_some() {
        return Err(Error::Config("tau is fixed by the level in a convergence study".into()));
    }
    if cfg.convergence.levels.len() < 2 {
        return Err(Error::Config("a convergence study needs at least two levels".into()));
    }
    let mut records = Vec::new();
    for &level in &cfg.convergence.levels {
        let dir = cfg.output.directory.join(format!("level_{level}"));
        let exact = cfg
            .case_at(level)?
            .exact
            .ok_or_else(|| Error::Config(format!("case {} has no exact solution", cfg.case.name)))?;
        let (_, sim, state) = run_into(cfg, level, &dir)?;
        let rec = error_norms(sim.discretization(), &state, &exact, state.time, sim.config().tau);
        log::info!(
            "level {level}: tau = {}, h = {:.4}, err_u = {:.4e}, err_rho = {:.4e}, err_p = {:.4e}",
            rec.tau,
            rec.h,
            rec.err_u,
            rec.err_rho,
            rec.err_p
        );
        records.push(rec);
    }
    let orders = convergence_orders(&records)?;
    write_errors_csv(&cfg.output.directory.join("errors.csv"), &records, &orders)?;
    Ok((records, orders))
}

fn report(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}

pub fn cmd_run(config: &Path) -> i32 {
    let cfg = match RunConfig::load(config) {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    match run_case(&cfg) {
        Ok(s) => {
            println!(
                "{} steps to t = {:.6}: mass {:.12e}, energy {:.12e}, min density {:.6e}",
                s.steps, s.last.t, s.last.mass, s.last.energy, s.last.min_density
            );
            if !s.violations.is_empty() {
                println!("{} property violations recorded", s.violations.len());
            }
            println!("diagnostics written to {}", s.output_dir.join("diagnostics.csv").display());
            EXIT_OK
        }
        Err(e) => report(&e),
    }
}

pub fn cmd_convergence(config: &Path) -> i32 {
    let cfg = match RunConfig::load(config) {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    match run_convergence(&cfg) {
        Ok((records, orders)) => {
            println!("{:>10} {:>8} {:>12} {:>12} {:>12} {:>8} {:>8} {:>8}", "tau", "h", "err_u", "err_rho", "err_p", "ord_u", "ord_rho", "ord_p");
            for (i, r) in records.iter().enumerate() {
                let o = i.checked_sub(1).map(|k| orders[k]);
                let fmt = |k: usize| o.map(|o| format!("{:8.4}", o[k])).unwrap_or_else(|| format!("{:>8}", "-"));
                println!(
                    "{:>10.6} {:>8.4} {:>12.4e} {:>12.4e} {:>12.4e} {} {} {}",
                    r.tau, r.h, r.err_u, r.err_rho, r.err_p, fmt(0), fmt(1), fmt(2)
                );
            }
            EXIT_OK
        }
        Err(e) => report(&e),
    }
}

pub fn cmd_list_cases() -> i32 {
    for c in list_cases() {
        println!("{}", c.name);
        println!("    {}", c.description);
        println!("    viscosity {}, tau {}, final time {}", c.viscosity, c.tau, c.final_time);
    }
    EXIT_OK
}

//! Manufactured-solution convergence table on the unit disk.

use vdflow::cases::case_manufactured_disk;
use vdflow::diagnostics::{convergence_orders, error_norms};
use vdflow::scheme::{SchemeConfig, Simulation};

fn main() -> vdflow::Result<()> {
    let levels: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut records = Vec::new();
    for level in 0..levels {
        let case = case_manufactured_disk(level)?;
        let exact = case.exact.clone().expect("manufactured case has an exact solution");
        let cfg = SchemeConfig::for_case(&case);
        let mut sim = Simulation::new(case, cfg.clone())?;
        let start = std::time::Instant::now();
        let mut gamma_dev: f64 = 0.0;
        let out = sim.run(&mut |_: &Simulation, _: &_, d: &vdflow::diagnostics::StepDiagnostics| {
            gamma_dev = gamma_dev.max((d.gamma - 1.0).abs());
            Ok(())
        })?;
        let rec = error_norms(sim.discretization(), &out.state, &exact, out.state.time, cfg.tau);
        let worst = out
            .diagnostics
            .iter()
            .map(|d| (d.energy_residual - d.boundary_work).abs())
            .fold(0.0, f64::max);
        println!(
            "tau = 1/{:<4} h = {:.4}  err_u = {:.4e}  err_rho = {:.4e}  err_p = {:.4e}  max|gamma-1| = {:.3e}  balance defect = {:.1e}  ({:.1?})",
            (1.0 / cfg.tau).round(),
            rec.h,
            rec.err_u,
            rec.err_rho,
            rec.err_p,
            gamma_dev,
            worst,
            start.elapsed()
        );
        records.push(rec);
    }
    if records.len() > 1 {
        for (i, o) in convergence_orders(&records)?.iter().enumerate() {
            println!("orders {}->{}: u {:.4}  rho {:.4}  p {:.4}", i, i + 1, o[0], o[1], o[2]);
        }
    }
    Ok(())
}

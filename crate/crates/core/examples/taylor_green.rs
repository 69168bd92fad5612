//! Decaying vortex array: energy decay for several viscosities.
//!
//! `cargo run --release --example taylor_green -- [cells] [final_time]`

use vdflow::cases::case_taylor_green_with_cells;
use vdflow::diagnostics::StepDiagnostics;
use vdflow::scheme::{SchemeConfig, SchemeState, Simulation};

fn main() -> vdflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let cells: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(24);
    let final_time: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);

    println!("{cells}x{cells} mesh, tau = 0.01, T = {final_time}");
    for mu in [0.1, 0.05, 0.01, 0.005] {
        let case = case_taylor_green_with_cells(mu, cells)?;
        let mut cfg = SchemeConfig::for_case(&case);
        cfg.final_time = final_time;
        let mut sim = Simulation::new(case, cfg)?;
        let mut grew = 0;
        let mut last = f64::INFINITY;
        let out = sim.run(&mut |_: &Simulation, _: &SchemeState, d: &StepDiagnostics| {
            if d.energy > last {
                grew += 1;
            }
            last = d.energy;
            Ok(())
        })?;
        let first = out.diagnostics[0];
        let end = out.diagnostics.last().unwrap();
        let residual = out.diagnostics.iter().map(|d| d.energy_residual.abs()).fold(0.0, f64::max);
        println!(
            "mu = {mu:<6} E: {:.6e} -> {:.6e}  steps with growth {grew}  max|energy residual| {residual:.1e}  mass drift {:.1e}",
            first.energy,
            end.energy,
            (end.mass - first.mass).abs() / first.mass
        );
    }
    Ok(())
}

//! Back-step channel flow with VTK snapshots of the recirculation zone.
//!
//! `cargo run --release --example backstep -- [final_time] [output_dir]`

use std::path::PathBuf;

use vdflow::cases::case_backstep;
use vdflow::cli::write_vtk;
use vdflow::diagnostics::StepDiagnostics;
use vdflow::scheme::{SchemeConfig, SchemeState, Simulation};

fn main() -> vdflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let final_time: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "output/backstep".into()));
    std::fs::create_dir_all(&dir)?;

    let case = case_backstep()?;
    let mut cfg = SchemeConfig::for_case(&case);
    cfg.final_time = final_time;
    let stride = (0.5 / cfg.tau).round() as usize;
    let mut sim = Simulation::new(case, cfg)?;
    println!("{} triangles", sim.mesh().element_count());

    sim.run(&mut |sim: &Simulation, s: &SchemeState, d: &StepDiagnostics| {
        if s.step % stride == 0 {
            let path = dir.join(format!("snapshot_{:04}.vtk", s.step));
            write_vtk(&path, sim.discretization(), s, d.min_density, false)?;
            let reverse = reverse_flow_length(sim, s);
            println!(
                "t = {:.2}  E = {:.5e}  mass = {:.12e}  reverse flow behind the step up to x = {:.3}",
                d.t, d.energy, d.mass, reverse
            );
        }
        Ok(())
    })?;
    println!("snapshots in {}", dir.display());
    Ok(())
}

/// Right end of the region with `u₁ < 0` just above the lower wall.
fn reverse_flow_length(sim: &Simulation, s: &SchemeState) -> f64 {
    let mut end: f64 = 1.0;
    for k in 1..700 {
        let p = [1.0 + 0.01 * k as f64, 0.02];
        if let Some((t, l)) = sim.mesh().locate(p) {
            if s.velocity.eval_vector(t, l)[0] < 0.0 {
                end = end.max(p[0]);
            }
        }
    }
    end
}

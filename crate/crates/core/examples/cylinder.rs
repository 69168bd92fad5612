//! Channel flow past a cylinder: upstream symmetry and wake asymmetry.
//!
//! `cargo run --release --example cylinder -- [final_time]`

use vdflow::cases::case_cylinder;
use vdflow::diagnostics::StepDiagnostics;
use vdflow::scheme::{SchemeConfig, SchemeState, Simulation};

fn main() -> vdflow::Result<()> {
    let final_time: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let case = case_cylinder()?;
    let mut cfg = SchemeConfig::for_case(&case);
    cfg.final_time = final_time;
    let stride = (0.5 / cfg.tau).round() as usize;
    let mut sim = Simulation::new(case, cfg)?;
    println!("{} triangles", sim.mesh().element_count());

    sim.run(&mut |sim: &Simulation, s: &SchemeState, d: &StepDiagnostics| {
        if s.step % stride == 0 && s.step > 0 {
            let (u1, u2) = line_means(sim, s, 0.01, 0.69);
            let (w1, w2) = line_means(sim, s, 1.5, 3.0);
            println!(
                "t = {:.2}  upstream |u2|/|u1| = {:.2e}  wake |u2|/|u1| = {:.2e}  E = {:.5e}",
                d.t,
                u2 / u1,
                w2 / w1,
                d.energy
            );
        }
        Ok(())
    })?;
    Ok(())
}

/// Mean `|u₁|`, `|u₂|` along `y = 0.5` between `x0` and `x1`.
fn line_means(sim: &Simulation, s: &SchemeState, x0: f64, x1: f64) -> (f64, f64) {
    let n = 60;
    let (mut a, mut b) = (0.0, 0.0);
    for k in 0..=n {
        let x = x0 + (x1 - x0) * k as f64 / n as f64;
        let (t, l) = sim.mesh().locate([x, 0.5]).expect("point inside the channel");
        let u = s.velocity.eval_vector(t, l);
        a += u[0].abs();
        b += u[1].abs();
    }
    (a, b)
}

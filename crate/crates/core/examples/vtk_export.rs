//! Initial manufactured state exported as plain and subdivided VTK.

use std::path::PathBuf;

use vdflow::cases::case_manufactured_disk;
use vdflow::cli::write_vtk;
use vdflow::diagnostics::min_density_sample;
use vdflow::scheme::{SchemeConfig, Simulation};

fn main() -> vdflow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "output/vtk".into()));
    std::fs::create_dir_all(&dir)?;
    let case = case_manufactured_disk(1)?;
    let cfg = SchemeConfig::for_case(&case);
    let mut sim = Simulation::new(case, cfg)?;
    let state = sim.init_state()?;
    let min = min_density_sample(sim.discretization(), &state.density);
    for (name, subdivide) in [("initial.vtk", false), ("initial_fine.vtk", true)] {
        let path = dir.join(name);
        write_vtk(&path, sim.discretization(), &state, min, subdivide)?;
        println!("{}: {} bytes", path.display(), std::fs::metadata(&path)?.len());
    }
    Ok(())
}

//! Drives a run from an in-memory TOML config, as the binary does.

use vdflow::cli::{run_case, RunConfig};

const CONFIG: &str = r#"
[case]
name = "taylor-green"
viscosity = 0.05
tau = 0.02
final_time = 0.2

[output]
directory = "output/run_config"
snapshot_stride = 5

[assertions]
mode = "strict"
"#;

fn main() -> vdflow::Result<()> {
    let cfg = RunConfig::from_toml(CONFIG)?;
    let summary = run_case(&cfg)?;
    println!(
        "{} steps, {} snapshots, final energy {:.6e}",
        summary.steps, summary.snapshots, summary.last.energy
    );
    print!("{}", std::fs::read_to_string(summary.output_dir.join("diagnostics.csv"))?);
    Ok(())
}

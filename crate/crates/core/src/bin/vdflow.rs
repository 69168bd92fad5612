use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "vdflow", version, about = "Variable-density incompressible flow solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case from a TOML configuration.
    Run { config: PathBuf },
    /// Run the configured refinement levels and write errors.csv.
    Convergence { config: PathBuf },
    /// Print the available cases and their defaults.
    ListCases,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let code = match Cli::parse().command {
        Command::Run { config } => vdflow::cli::cmd_run(&config),
        Command::Convergence { config } => vdflow::cli::cmd_convergence(&config),
        Command::ListCases => vdflow::cli::cmd_list_cases(),
    };
    ExitCode::from(code as u8)
}

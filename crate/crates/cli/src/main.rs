use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hystwave_cli::{default_exec, run_command, sweep_command, validate_command, SweepParam};

#[derive(Parser)]
#[command(name = "hystwave", version, about = "Periodic solutions of a wave system with Preisach hysteresis")]
struct Cli {
    /// Directory for reports; overrides `output.dir`.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for the data-parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized corpora; runs themselves are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write its report.
    Run { config: PathBuf },
    /// Solve the scenario for each value of a parameter.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value = "delta")]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
    },
    /// Check the density, basis and solver settings only.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads {n}: {e}");
            return ExitCode::from(hystwave_cli::EXIT_CONFIG as u8);
        }
        #[cfg(not(feature = "parallel"))]
        let _ = n;
    }
    let _ = cli.seed;
    let exec = default_exec();
    let out = cli.out_dir.as_deref();
    let code = match &cli.command {
        Command::Run { config } => run_command(config, out, exec),
        Command::Sweep { config, param, values } => sweep_command(config, *param, values, out, exec),
        Command::Validate { config } => validate_command(config),
    };
    ExitCode::from(code as u8)
}

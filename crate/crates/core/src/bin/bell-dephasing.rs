use std::path::PathBuf;
use std::process::ExitCode;

use bell_dephasing::scenario::{self, Artifact, OutputFormat, Scenario, ScenarioResult};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    version,
    about = "Two-qubit dephasing scenarios: sweeps, angle scans, tomography errors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// E, B and Bell coefficients along the sweep variable.
    Sweep(Common),
    /// CHSH value while rotating single waveplates away from a center setting.
    Scan(Common),
    /// Photon-statistics errors of simulated tomography.
    Tomo(Common),
    /// Region of the tetrahedron and predicted dephasing fate.
    Classify(Common),
    /// Numerically optimal CHSH measurement.
    Chsh(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

type Runner = fn(&Scenario, OutputFormat) -> ScenarioResult<Vec<Artifact>>;

fn run(
    args: &Common,
    default_format: OutputFormat,
    runner: Runner,
) -> ScenarioResult<Vec<Artifact>> {
    let mut s = scenario::load_config(&args.config)?;
    if let Some(seed) = args.seed {
        s.config.seed = seed;
    }
    let artifacts = runner(&s, args.format.unwrap_or(default_format))?;
    scenario::write_artifacts(&args.out, &artifacts)?;
    Ok(artifacts)
}

fn main() -> ExitCode {
    let (args, default_format, runner): (Common, OutputFormat, Runner) = match Cli::parse().command
    {
        Command::Sweep(a) => (a, OutputFormat::Csv, scenario::run_sweep),
        Command::Scan(a) => (a, OutputFormat::Csv, scenario::run_scan),
        Command::Tomo(a) => (a, OutputFormat::Json, scenario::run_tomo_sim),
        Command::Classify(a) => (a, OutputFormat::Json, scenario::run_classify),
        Command::Chsh(a) => (a, OutputFormat::Json, scenario::run_chsh),
    };
    match run(&args, default_format, runner) {
        Ok(artifacts) => {
            for a in artifacts {
                println!("{}", args.out.join(a.file_name).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

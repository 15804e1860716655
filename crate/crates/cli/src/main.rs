use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kestenlab_cli::{run, Overrides, RunOptions, Task};

#[derive(Debug, Parser)]
#[command(
    name = "kestenlab",
    version,
    about = "Pressure, group extensions and amenability experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true, env = "KESTEN_CONFIG")]
    config: Option<PathBuf>,
    /// Directory for results.json and the CSV series.
    #[arg(long, global = true, env = "KESTEN_OUT", default_value = "out")]
    out: PathBuf,
    /// Overrides `[numerics].n_max`.
    #[arg(long, global = true, env = "KESTEN_N_MAX")]
    n_max: Option<usize>,
    /// Overrides `[numerics].ball_radius`.
    #[arg(long, global = true, env = "KESTEN_BALL_RADIUS")]
    ball_radius: Option<usize>,
    /// Seed for sampled test functions.
    #[arg(long, global = true, env = "KESTEN_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 lets the pool decide).
    #[arg(long, global = true, env = "KESTEN_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Gurevič pressure, Gibbs and conformal checks.
    Pressure,
    /// Return series on the extension and the amenability verdict.
    ExtensionPressure,
    /// Symmetrized walk, self-adjointness and spectral radius estimates.
    Kesten,
    /// Co-growth counts of a free-group homomorphism.
    Cogrowth,
    /// Følner set search or staged construction.
    Folner,
    /// Involution and cocycle symmetry checks.
    VerifySymmetry,
    /// Every task the config supports, run in parallel.
    Report,
}

impl From<Command> for Task {
    fn from(c: Command) -> Self {
        match c {
            Command::Pressure => Task::Pressure,
            Command::ExtensionPressure => Task::ExtensionPressure,
            Command::Kesten => Task::Kesten,
            Command::Cogrowth => Task::Cogrowth,
            Command::Folner => Task::Folner,
            Command::VerifySymmetry => Task::VerifySymmetry,
            Command::Report => Task::Report,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let Some(config) = cli.config else {
        eprintln!("error: --config: a configuration file is required");
        return ExitCode::from(2);
    };
    let opts = RunOptions {
        task: cli.command.into(),
        config,
        out: cli.out,
        overrides: Overrides {
            n_max: cli.n_max,
            ball_radius: cli.ball_radius,
        },
        seed: cli.seed,
    };
    match run(&opts) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

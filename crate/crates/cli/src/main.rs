use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use learncap_cli::{parse_config, run_experiment, ExperimentKind, RunError, RunOptions};

#[derive(Parser)]
#[command(
    name = "learncap",
    version,
    about = "Learning-capability experiments for parametrized quantum circuits"
)]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the config value, then to all cores.
    #[arg(long, global = true, env = "LEARNCAP_WORKERS")]
    workers: Option<usize>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress per-function progress lines.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Mean final validation loss over a function set.
    Capability,
    /// Fourier coefficients of the model at random parameters.
    Coeffs,
    /// Gradient variance of the probe parameter at random parameters.
    Barren,
    /// Gate and parameter counts of an ansatz.
    Counts,
    /// Random normalized Fourier series plus their cross-correlations.
    FourierGen,
    /// Dimension of the Lie algebra generated by the ansatz gates.
    Dla,
    /// Capability under a calibrated device noise model.
    NoisyCapability,
    /// Capability with shot-sampled expectation values.
    ShotCapability,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Command::Capability => ExperimentKind::Capability,
            Command::Coeffs => ExperimentKind::Coeffs,
            Command::Barren => ExperimentKind::Barren,
            Command::Counts => ExperimentKind::Counts,
            Command::FourierGen => ExperimentKind::FourierGen,
            Command::Dla => ExperimentKind::Dla,
            Command::NoisyCapability => ExperimentKind::NoisyCapability,
            Command::ShotCapability => ExperimentKind::ShotCapability,
        }
    }
}

const CONFIG_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    let Some(path) = &cli.config else {
        eprintln!("error: `{}` needs --config <path>", kind.name());
        return ExitCode::from(CONFIG_ERROR);
    };
    let parsed = parse_config(path).and_then(|mut c| {
        // Applied before resolving so the function-set seed follows it too.
        if let Some(seed) = cli.seed {
            c.seed = Some(seed);
        }
        c.resolve()
    });
    let cfg = match parsed {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    if cfg.kind != kind {
        eprintln!(
            "error: config describes a `{}` experiment, not `{}`",
            cfg.kind.name(),
            kind.name()
        );
        return ExitCode::from(CONFIG_ERROR);
    }
    if cli.workers == Some(0) {
        eprintln!("error: --workers must be at least 1");
        return ExitCode::from(CONFIG_ERROR);
    }
    let workers = cli
        .workers
        .or(cfg.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let out_dir = cli
        .out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let opts = RunOptions {
        workers,
        out_dir,
        progress: !cli.quiet,
    };

    match run_experiment(&cfg, &opts) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RUNTIME_ERROR)
        }
    }
}

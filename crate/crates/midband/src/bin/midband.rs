use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use midband::cli::{run, validate, Experiment};
use midband::Error;

/// Finite-volume laboratory for random lattice Schrödinger operators.
///
/// Every experiment reads one TOML config, writes deterministic data
/// files plus a hashed manifest, and exits 0 only if its checks pass.
/// Set MIDBAND_THREADS to pin the worker-thread count.
#[derive(Parser)]
#[command(name = "midband", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Path to the experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the hopping symbol over the momentum torus.
    #[command(name = "torus-lemma")]
    TorusLemma(ConfigArg),
    /// Check the conjugate-operator commutator identity on random interior vectors.
    #[command(name = "commutator-identity")]
    CommutatorIdentity(ConfigArg),
    /// Run the structural checks of the annular bump layout.
    #[command(name = "hypothesis-check")]
    HypothesisCheck(ConfigArg),
    /// Tabulate the smoothed-cutoff linearity bound over a coupling grid.
    #[command(name = "lemma1")]
    Lemma1(ConfigArg),
    /// Compute compressed-commutator minimum eigenvalues at one coupling.
    #[command(name = "mourre")]
    Mourre(ConfigArg),
    /// Scan couplings for the largest one that keeps the filtered bound positive.
    #[command(name = "lambda-scan")]
    LambdaScan(ConfigArg),
    /// Measure residuals of windowed plane-wave witnesses.
    #[command(name = "weyl")]
    Weyl(ConfigArg),
    /// Diagonalize one realization and check band containment.
    #[command(name = "spectrum")]
    Spectrum(ConfigArg),
    /// Histogram the eigenvalues of one realization.
    #[command(name = "dos")]
    Dos(ConfigArg),
    /// Parse and validate a config, printing the resolved form.
    #[command(name = "validate")]
    Validate(ConfigArg),
}

impl Command {
    fn config_arg(&self) -> &ConfigArg {
        match self {
            Command::TorusLemma(c)
            | Command::CommutatorIdentity(c)
            | Command::HypothesisCheck(c)
            | Command::Lemma1(c)
            | Command::Mourre(c)
            | Command::LambdaScan(c)
            | Command::Weyl(c)
            | Command::Spectrum(c)
            | Command::Dos(c)
            | Command::Validate(c) => c,
        }
    }

    fn experiment(&self) -> Option<Experiment> {
        match self {
            Command::TorusLemma(_) => Some(Experiment::TorusLemma),
            Command::CommutatorIdentity(_) => Some(Experiment::CommutatorIdentity),
            Command::HypothesisCheck(_) => Some(Experiment::HypothesisCheck),
            Command::Lemma1(_) => Some(Experiment::Lemma1),
            Command::Mourre(_) => Some(Experiment::Mourre),
            Command::LambdaScan(_) => Some(Experiment::LambdaScan),
            Command::Weyl(_) => Some(Experiment::Weyl),
            Command::Spectrum(_) => Some(Experiment::Spectrum),
            Command::Dos(_) => Some(Experiment::Dos),
            Command::Validate(_) => None,
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn apply_thread_env() -> Result<(), String> {
    let Ok(raw) = std::env::var("MIDBAND_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("MIDBAND_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("thread pool setup failed: {e}"))
}

fn main() -> ExitCode {
    if let Err(msg) = apply_thread_env() {
        eprintln!("{msg}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let cli = Cli::parse();
    let path = &cli.command.config_arg().config;
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read config {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cfg = match validate(&text) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let Some(expected) = cli.command.experiment() else {
        println!(
            "{}",
            serde_json::to_string_pretty(&cfg).expect("config serializes")
        );
        return ExitCode::SUCCESS;
    };
    if cfg.experiment != expected {
        eprintln!(
            "config names experiment `{}` but the subcommand is `{expected}`",
            cfg.experiment
        );
        return ExitCode::from(EXIT_CONFIG);
    }

    match run(&cfg) {
        Ok(manifest) => {
            let verdict = if manifest.pass { "PASS" } else { "FAIL" };
            println!(
                "{expected}: {verdict} ({} data files in {})",
                manifest.outputs.len(),
                cfg.output_path.display()
            );
            if manifest.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("{expected} failed: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wgossip::report::{self, Command, OutputFormat, RunConfig};
use wgossip::spectral::ConductanceMode;

#[derive(Parser)]
#[command(name = "wgossip", version, about = "Willingness gossip: validate, simulate and analyze acquaintance networks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a network file against the model assumptions.
    Validate(Opts),
    /// Run a seeded ensemble of gossip replicas.
    Simulate(Opts),
    /// Full analysis report (stationary law, bounds, impacts, verdicts).
    Analyze(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Conductance {
    Exact,
    Skip,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Opts {
    #[arg(long, env = "WG_NETWORK")]
    network: PathBuf,
    #[arg(long, env = "WG_REPLICAS", default_value_t = 1000)]
    replicas: usize,
    #[arg(long, env = "WG_MAX_SLOTS", default_value_t = 1_000_000)]
    max_slots: u64,
    #[arg(long, env = "WG_TOL", default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, env = "WG_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "WG_MIXING_THRESHOLD", default_value_t = 0.1)]
    mixing_threshold: f64,
    #[arg(long, env = "WG_CONDUCTANCE", value_enum, default_value = "exact")]
    conductance: Conductance,
    #[arg(long, env = "WG_FORMAT", value_enum, default_value = "json")]
    format: Format,
    #[arg(long, env = "WG_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "WG_TRACE")]
    trace: Option<PathBuf>,
    /// Rescale each row of meeting probabilities to sum to 1 before validating.
    #[arg(long, env = "WG_NORMALIZE")]
    normalize: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, o) = match cli.command {
        Cmd::Validate(o) => (Command::Validate, o),
        Cmd::Simulate(o) => (Command::Simulate, o),
        Cmd::Analyze(o) => (Command::Analyze, o),
    };
    let config = RunConfig {
        command,
        network: o.network,
        replicas: o.replicas,
        max_slots: o.max_slots,
        tol: o.tol,
        seed: o.seed,
        mixing_threshold: o.mixing_threshold,
        conductance: match o.conductance {
            Conductance::Exact => ConductanceMode::Exact,
            Conductance::Skip => ConductanceMode::Skip,
        },
        format: match o.format {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        },
        out: o.out,
        trace: o.trace,
        normalize: o.normalize,
    };
    let code = report::run(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}

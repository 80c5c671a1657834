use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::Failure;

/// Simulate and analyse agent mobility in virtual worlds.
#[derive(Debug, Parser)]
#[command(name = "metamob", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic trajectories as NDJSON.
    Simulate(SimulateArgs),
    /// Build the mobility network of a trajectory file.
    BuildNet(BuildNetArgs),
    /// Estimate scaling laws and mobility metrics.
    Analyze(AnalyzeArgs),
    /// Replace every location with an i.i.d. uniform draw from the world.
    Randomize(RandomizeArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Trajectory file (NDJSON, or CSV with a header row).
    input: PathBuf,
    /// Input format; guessed from the extension or content if omitted.
    #[arg(long, value_parser = ["ndjson", "csv"])]
    format: Option<String>,
    /// Column mapping for ingested logs, e.g. `agent=user,t=ts,loc=land`.
    #[arg(long)]
    map: Option<String>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    locations: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
    /// Moves per activation.
    #[arg(long)]
    moves: Option<u32>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Grid bounds `xmin:xmax,ymin:ymax`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    jump_exponent: Option<f64>,
    /// `always`, `uniform:LO:HI` or `file:PATH`.
    #[arg(long)]
    activation: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file, `-` for standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildNetArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output prefix; writes PREFIX_edges.csv and PREFIX_nodes.csv.
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, conflicts_with = "undirected")]
    directed: bool,
    #[arg(long)]
    undirected: bool,
    /// Edge weight summarised on standard output.
    #[arg(long, default_value = "agents")]
    weight: String,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Network prefix written by `build-net`; built from the input if omitted.
    #[arg(long)]
    net: Option<PathBuf>,
    /// Treat the network as directed.
    #[arg(long)]
    directed: bool,
    /// Grid bounds `xmin:xmax,ymin:ymax` enabling spatial metrics.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Report path, `-` for standard output.
    #[arg(long, default_value = "-")]
    report: PathBuf,
    /// Directory for curve CSVs; defaults to next to the report file.
    #[arg(long)]
    curves: Option<PathBuf>,
    /// Window length for return and preferential metrics (default: 1 for
    /// generated files, 86400 for ingested logs).
    #[arg(long)]
    window: Option<u64>,
    #[arg(long, default_value = "agents")]
    weight: String,
    #[arg(long, default_value_t = 10)]
    teleport_threshold: u64,
    #[arg(long, default_value_t = 0.01)]
    top_fraction: f64,
    /// `moore` or `von-neumann`.
    #[arg(long, default_value = "moore")]
    neighborhood: String,
}

#[derive(Debug, Args)]
struct RandomizeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output file, `-` for standard output.
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw from this grid instead of the input's world.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(f) = commands::init_threads() {
        return f.report();
    }
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::BuildNet(a) => commands::build_net(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Randomize(a) => commands::randomize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

impl Failure {
    fn report(self) -> ExitCode {
        eprintln!("error: {}", self.message);
        ExitCode::from(self.code)
    }
}

//! `catalysis`: data files for photon-catalysed coherent states.
//!
//! Exit status is 0 on success, 2 for usage or validation problems and 3
//! when a numerical gate (truncation, vanishing herald probability, ...)
//! refuses to produce a result.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "catalysis", version, about = "Photon catalysis of coherent states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Heralded state for one configuration, with a metric summary.
    State(StateArgs),
    /// Metric table over a grid of parameters.
    Sweep(SweepArgs),
    /// Sampled Wigner function of the heralded state.
    Wigner(WignerArgs),
    /// Joint click statistics of both beam-splitter outputs over an r2 scan.
    Joint(JointArgs),
    /// Reflectivities of iterated catalysis that best reproduce a target.
    Optimize(OptimizeArgs),
    /// Writes a cat-state target in the state JSON format.
    Css(CssArgs),
    /// Compares the closed-form state with brute-force two-mode evolution.
    Oracle(PointArgs),
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Real coherent amplitude.
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Intensity reflectivity.
    #[arg(long)]
    r2: f64,
    /// Catalyst photon number.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Fock truncation (chosen from alpha and k when omitted).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args)]
struct StateArgs {
    #[command(flatten)]
    point: PointArgs,
    /// State JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// var_x_db, var_p_db, success_prob, g2, fidelity_to_target or wigner_min.
    #[arg(long)]
    metric: String,
    /// Swept parameter as name:min:max:steps (r2, alpha, alpha2, k); repeat
    /// for more axes, the first one varying slowest.
    #[arg(long = "axis", required = true)]
    axes: Vec<String>,
    /// Value of alpha when not swept.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Value of r2 when not swept.
    #[arg(long, default_value_t = 0.5)]
    r2: f64,
    /// Value of k when not swept.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Target state JSON for fidelity_to_target.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Herald with a lossy TMD of this efficiency instead of ideal photon
    /// counting (affects g2 and success_prob).
    #[arg(long)]
    herald_eta: Option<f64>,
    #[arg(long, default_value_t = 8)]
    herald_bins: usize,
    /// CSV output (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GridFormat {
    Csv,
    Pgm,
}

#[derive(Debug, Args)]
struct WignerArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Either half_width:points or x_min:x_max:p_min:p_max:nx:np.
    #[arg(long, default_value = "5:201", allow_hyphen_values = true)]
    grid: String,
    #[arg(long, value_enum, default_value_t = GridFormat::Csv)]
    format: GridFormat,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct JointArgs {
    /// Mean photon number of the coherent input.
    #[arg(long)]
    alpha2: f64,
    /// A single reflectivity or a scan min:max:steps.
    #[arg(long)]
    r2: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Efficiency of the herald-arm detector (TMD1).
    #[arg(long, default_value_t = 1.0)]
    eta1: f64,
    /// Efficiency of the signal-arm detector (TMD2).
    #[arg(long, default_value_t = 1.0)]
    eta2: f64,
    /// Bins per detector.
    #[arg(long, default_value_t = 8)]
    bins: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    /// Target state JSON.
    #[arg(long)]
    target: PathBuf,
    /// Number of catalysis stages.
    #[arg(long, default_value_t = 1)]
    stages: usize,
    /// Catalyst photon numbers, one per stage or a single value for all.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    k: Vec<usize>,
    /// Fixed coherent amplitude.
    #[arg(long, conflicts_with = "alpha_range", allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Let alpha vary within min:max.
    #[arg(long)]
    alpha_range: Option<String>,
    /// Smallest coordinate move pursued.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Construction {
    Literal,
    DisplacedEvenCat,
}

#[derive(Debug, Args)]
struct CssArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 40)]
    dim: usize,
    #[arg(long, value_enum, default_value_t = Construction::Literal)]
    construction: Construction,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), commands::CliError> {
    let Ok(value) = std::env::var("CATALYSIS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| commands::CliError::Usage(format!("CATALYSIS_THREADS='{value}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| commands::CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), commands::CliError> {
    configure_threads()?;
    match cli.command {
        Command::State(a) => commands::state(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Wigner(a) => commands::wigner(a),
        Command::Joint(a) => commands::joint(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Css(a) => commands::css(a),
        Command::Oracle(a) => commands::oracle(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

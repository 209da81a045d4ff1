use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mubcert",
    version,
    about = "Certify mutually unbiased bases from random access code statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a MUB pair and report its figures of merit.
    Mub(MubArgs),
    /// Simulate the interferometer and write detection counts as CSV.
    Simulate(SimulateArgs),
    /// Certify MUB properties from counts or from an ASP value.
    Certify(CertifyArgs),
    /// Write plot-ready outcome probabilities and per-state ASP tables.
    FigureData(FigureDataArgs),
    /// Re-run a command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    PaperD4,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct MubArgs {
    #[arg(long, value_enum, default_value = "paper-d4")]
    pub construction: ConstructionArg,
    /// Dimension (the paper-d4 construction requires 4).
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    /// Output JSON file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// InterferometerConfig JSON; defaults are used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; drawn from OS entropy and recorded in the manifest when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of detections to record.
    #[arg(long, default_value_t = 60_000, conflicts_with = "pulses")]
    pub rounds: u64,
    /// Run a fixed number of source pulses instead of a detection target.
    #[arg(long)]
    pub pulses: Option<u64>,
    /// Emit exact expected counts of the noise-free experiment.
    #[arg(long, conflicts_with_all = ["pulses", "visibility_target"])]
    pub ideal: bool,
    /// Tune the phase-noise sigma to this mean fringe visibility first.
    #[arg(long)]
    pub visibility_target: Option<f64>,
    /// Output CSV (`i,j,y,outcome,count`).
    #[arg(long)]
    pub out: PathBuf,
    /// Manifest path; defaults to `<out>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Counts CSV.
    #[arg(long, conflicts_with_all = ["asp", "sigma"], required_unless_present = "asp")]
    pub counts: Option<PathBuf>,
    /// Observed average success probability.
    #[arg(long, allow_negative_numbers = true)]
    pub asp: Option<f64>,
    /// One-sigma uncertainty of `--asp`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Dimension; inferred from the counts when omitted.
    #[arg(long)]
    pub d: Option<usize>,
    /// CertificateReport JSON file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureDataArgs {
    #[arg(long)]
    pub counts: PathBuf,
    /// Directory receiving `outcome_probabilities.csv` and `per_state_asp.csv`.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

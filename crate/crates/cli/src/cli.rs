use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "qel", version, about = "BB84 eavesdropping analysis with weak coherent pulses and inefficient detectors")]
pub struct Cli {
    /// JSON file with run parameters; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Seed for every randomized step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eve's information versus disturbance for PNS and both cloners.
    #[command(allow_negative_numbers = true)]
    InfoCurves(InfoCurvesArgs),
    /// Observed error rate versus disturbance over a range of losses.
    #[command(allow_negative_numbers = true)]
    ErrorMap(ErrorMapArgs),
    /// Transmission window in which cloning can compete with PNS.
    #[command(allow_negative_numbers = true)]
    Bounds(ScenarioArgs),
    /// Smallest loss at which a cloner beats PNS for a given error rate.
    #[command(allow_negative_numbers = true)]
    Crossover(CrossoverArgs),
    /// Run every oracle suite; exit status 2 on any failed check.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Strategy-B probe coefficients a–f on a γ grid.
    #[command(allow_negative_numbers = true)]
    Coefficients(CoefficientsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::InfoCurves(_) => "info-curves",
            Command::ErrorMap(_) => "error-map",
            Command::Bounds(_) => "bounds",
            Command::Crossover(_) => "crossover",
            Command::Verify(_) => "verify",
            Command::Coefficients(_) => "coefficients",
        }
    }
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
pub struct ScenarioArgs {
    /// Mean photon number per pulse.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Detector efficiency.
    #[arg(long)]
    pub eta_det: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct DGridArgs {
    #[arg(long)]
    pub d_min: Option<f64>,
    #[arg(long)]
    pub d_max: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct InfoCurvesArgs {
    /// Detector efficiencies; repeat or separate by commas for several curves.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub eta_det: Vec<f64>,
    #[command(flatten)]
    pub grid: DGridArgs,
}

#[derive(Args, Debug)]
pub struct ErrorMapArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub grid: DGridArgs,
    /// A single channel loss instead of a loss grid.
    #[arg(long, conflicts_with_all = ["eta_t", "loss_min", "loss_max", "loss_steps"])]
    pub loss_db: Option<f64>,
    /// A single channel transmission instead of a loss grid.
    #[arg(long, conflicts_with_all = ["loss_min", "loss_max", "loss_steps"])]
    pub eta_t: Option<f64>,
    #[arg(long)]
    pub loss_min: Option<f64>,
    #[arg(long)]
    pub loss_max: Option<f64>,
    #[arg(long)]
    pub loss_steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CrossoverArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Observed error rate.
    #[arg(long)]
    pub e: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Pulses per Monte Carlo run.
    #[arg(long)]
    pub pulses: Option<u64>,
    /// Add DELTA to one strategy-B coefficient before checking (NAME=DELTA,
    /// NAME in a–f). Used to confirm the suites catch a wrong constant.
    #[arg(long, hide = true, value_name = "NAME=DELTA")]
    pub perturb_coefficient: Option<String>,
}

#[derive(Args, Debug)]
pub struct CoefficientsArgs {
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub gamma_steps: Option<usize>,
}

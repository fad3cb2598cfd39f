use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "suffdiv", version, about = "Divergences, scoring rules, sufficiency checks, portfolios and extractable energy")]
pub struct Cli {
    /// Report information quantities in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Convergence tolerance for iterative solvers.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol: Option<f64>,

    /// Read the whole invocation from a JSON experiment file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative entropy and entropies of two probability vectors.
    Divergence(DivergenceArgs),
    /// Expected score, induced divergence and a properness check.
    Score(ScoreArgs),
    /// Randomized invariance check of a divergence under sufficient maps.
    Suffcheck(SuffcheckArgs),
    /// Log-optimal portfolios, wealth simulation and regret.
    #[command(subcommand)]
    Portfolio(PortfolioCommand),
    /// Gibbs state and extractable energy.
    Thermo(ThermoArgs),
    /// Bregman divergence of a generator.
    Bregman(BregmanArgs),
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    /// First distribution as a JSON array.
    #[arg(long, value_name = "JSON")]
    pub p: String,
    /// Second distribution as a JSON array.
    #[arg(long, value_name = "JSON")]
    pub q: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleName {
    Log,
    Brier,
    Burg,
    Linear,
    FromGenerator,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, value_enum)]
    pub rule: RuleName,
    /// Generator for `--rule from-generator`: negentropy, sqnorm, burg or table:<file>.
    #[arg(long, value_name = "NAME", required_if_eq("rule", "from-generator"))]
    pub generator: Option<String>,
    /// True distribution.
    #[arg(long = "P", value_name = "JSON")]
    pub p: String,
    /// Forecast.
    #[arg(long = "Q", value_name = "JSON")]
    pub q: String,
    /// Lattice spacing of the properness sweep.
    #[arg(long, value_name = "STEP")]
    pub grid_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SuffcheckArgs {
    /// kl, sqnorm, burg or bregman:<generator>.
    #[arg(long, value_name = "NAME")]
    pub divergence: String,
    #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Omit the per-trial table.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Debug, Subcommand)]
pub enum PortfolioCommand {
    /// Log-optimal portfolio with its KKT certificate.
    Solve(MarketArg),
    /// Simulated wealth of a constant rebalanced portfolio.
    Simulate(SimulateArgs),
    /// Rate lost by optimizing for Q, against the bound D(P‖Q).
    Regret(RegretArgs),
}

#[derive(Debug, Args)]
pub struct MarketArg {
    /// CSV with header `prob,x1,...,xk`, one row per outcome.
    #[arg(long, value_name = "CSV")]
    pub market: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub market: MarketArg,
    /// Portfolio as a JSON array.
    #[arg(long, value_name = "JSON")]
    pub b: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Include the full log-wealth path.
    #[arg(long)]
    pub path: bool,
}

#[derive(Debug, Args)]
pub struct RegretArgs {
    #[command(flatten)]
    pub market: MarketArg,
    /// Distribution the investor optimizes for.
    #[arg(long = "Q", value_name = "JSON")]
    pub q: String,
}

#[derive(Debug, Args)]
pub struct ThermoArgs {
    /// Level energies in joules as a JSON array.
    #[arg(long, value_name = "JSON")]
    pub levels: String,
    /// Bath temperature in kelvin.
    #[arg(long = "T", value_name = "KELVIN")]
    pub temperature: f64,
    /// Non-equilibrium state as a JSON array.
    #[arg(long, value_name = "JSON")]
    pub state: String,
}

#[derive(Debug, Args)]
pub struct BregmanArgs {
    /// negentropy, sqnorm, burg or table:<file>.
    #[arg(long, value_name = "NAME")]
    pub generator: String,
    #[arg(long, value_name = "JSON")]
    pub p: String,
    #[arg(long, value_name = "JSON")]
    pub q: String,
    /// Second generator to test for affine equivalence.
    #[arg(long, value_name = "NAME")]
    pub compare: Option<String>,
}

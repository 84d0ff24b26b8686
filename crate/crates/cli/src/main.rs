//! `replicalc`: replication probabilities, predictive power and sample sizes
//! from the command line.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "replicalc",
    version,
    about = "Replication probabilities, predictive power and sample sizes"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "REPLICALC_FORMAT", default_value = "plain")]
    format: Format,
    /// Decimals kept when printing numbers.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=15))]
    precision: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probability that a repeat study reaches P <= p3.
    Replicate(StudyArgs),
    /// Probability that a repeat study finds an effect of the same sign.
    Prep(PrepArgs),
    /// Sample size for a target power, or power at a given sample size.
    Power(PowerArgs),
    /// Reproduce the P value comparison table (1) or the power table (2).
    Table(TableArgs),
    /// Discretise a Gaussian onto fixed-width bins, optionally convolved with noise.
    Discretize(DiscretizeArgs),
    /// Check a closed form against the two-stage Monte Carlo model.
    Simulate(SimulateArgs),
    /// Write the replication curves with the empirical markers.
    Curves(CurvesArgs),
}

/// Replicating sample size; `inf` for a study large enough to reveal the truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum N2 {
    Finite(u64),
    Infinite,
}

fn parse_n2(s: &str) -> Result<N2, String> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "infinite" | "infinity" => Ok(N2::Infinite),
        other => other
            .parse::<u64>()
            .map(N2::Finite)
            .map_err(|_| format!("expected a whole number or `inf`, got `{s}`")),
    }
}

/// The first study, either as its design or as its P value.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").args(["b", "p1"]).required(true)))]
pub struct StudyArgs {
    /// Effect estimate of the first study.
    #[arg(long, allow_hyphen_values = true, requires_all = ["sd", "n1", "n2"])]
    pub b: Option<f64>,
    /// Standard deviation of the individual differences.
    #[arg(long, requires = "b")]
    pub sd: Option<f64>,
    /// Sample size of the first study.
    #[arg(long, requires = "b")]
    pub n1: Option<u64>,
    /// Sample size of the replication, or `inf`.
    #[arg(long, value_parser = parse_n2)]
    pub n2: Option<N2>,
    /// P value of the first study.
    #[arg(long, conflicts_with_all = ["b", "sd", "n1"])]
    pub p1: Option<f64>,
    /// Read --p1 as one-sided (the default).
    #[arg(long, requires = "p1", conflicts_with = "two_sided")]
    pub one_sided: bool,
    /// Read --p1 as two-sided.
    #[arg(long, requires = "p1")]
    pub two_sided: bool,
    /// One-sided threshold the replication has to reach.
    #[arg(long, default_value_t = replicalc::replication::DEFAULT_P3)]
    pub p3: f64,
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    /// P value of the first study.
    #[arg(long)]
    pub p1: f64,
    #[arg(long, conflicts_with = "two_sided")]
    pub one_sided: bool,
    #[arg(long)]
    pub two_sided: bool,
    /// Compare against the true effect instead of a same-size replication.
    #[arg(long)]
    pub infinite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignArg {
    Crossover,
    Parallel,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("goal").args(["target_power", "target_predictive", "n"]).required(true)))]
pub struct PowerArgs {
    /// Expected effect.
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    /// Standard deviation of the individual differences.
    #[arg(long)]
    pub sd: f64,
    /// Two-sided significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Likelihood power to reach at the assumed effect.
    #[arg(long)]
    pub target_power: Option<f64>,
    /// Predictive power to reach.
    #[arg(long)]
    pub target_predictive: Option<f64>,
    /// Evaluate power at this sample size.
    #[arg(long)]
    pub n: Option<u64>,
    /// Number of summed variances (1 likelihood, 2 first study, 3 replication).
    #[arg(long, conflicts_with = "target_power", value_parser = clap::value_parser!(u8).range(1..=3))]
    pub multiplicity: Option<u8>,
    /// Report the total for a parallel-group trial as well.
    #[arg(long, value_enum, default_value = "crossover")]
    pub design: DesignArg,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Which table to reproduce.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub which: u8,
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mean: f64,
    #[arg(long)]
    pub sd: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -4.0)]
    pub lo: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 8.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Convolve with zero-mean Gaussian noise of this SD.
    #[arg(long)]
    pub convolve_sd: Option<f64>,
    /// Report the mass at or above this value, snapped to the nearest bin edge.
    #[arg(long, allow_hyphen_values = true)]
    pub tail_at: Option<f64>,
    /// Histogram destination; without it the histogram goes to stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    PValue,
    SameSign,
    Rival,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "p-value")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub z_lo: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 4.0)]
    pub z_hi: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        format: cli.format,
        precision: usize::from(cli.precision),
    };
    let result = match &cli.command {
        Command::Replicate(a) => commands::replicate(&ctx, a),
        Command::Prep(a) => commands::prep(&ctx, a),
        Command::Power(a) => commands::power(&ctx, a),
        Command::Table(a) => commands::table(&ctx, a),
        Command::Discretize(a) => commands::discretize(&ctx, a),
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Curves(a) => commands::curves(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("replicalc: {e}");
            ExitCode::from(e.code())
        }
    }
}

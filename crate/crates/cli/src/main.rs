//! `polcorr`: polarization correlations of annihilation photon pairs.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::output::OutputFormat;

#[derive(Parser, Debug)]
#[command(
    name = "polcorr",
    version,
    about = "Polarization correlations and Bell-type bounds for photon pairs"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: OutputFormat,

    /// Write output here instead of stdout. Table and CSV output also get a
    /// `<path>.manifest.json` sidecar.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Joint and single-photon probabilities at one analyzer setting.
    Prob(ProbArgs),
    /// The Clauser-Horne statistic for one angle quadruple.
    Bell(BellArgs),
    /// The statistic over a list or range of speeds.
    Scan(ScanArgs),
    /// Run the numerical self-checks.
    Oracle(OracleArgs),
    /// Search analyzer angles for the extreme statistic.
    Search(SearchArgs),
    /// Monte Carlo estimate of the statistic.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Process number: 1 (back-to-back) or 2 (photons along the motion axis).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    process: u8,
    /// Positron speed in units of c, in [0, 1].
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
}

#[derive(Args, Debug)]
struct ProbArgs {
    #[command(flatten)]
    common: Common,
    /// First analyzer angle in degrees.
    #[arg(long, allow_negative_numbers = true)]
    chi1: f64,
    /// Second analyzer angle in degrees.
    #[arg(long, allow_negative_numbers = true)]
    chi2: f64,
}

#[derive(Args, Debug)]
struct AnglesArg {
    /// Angles chi1,chi2,chi1',chi2' in degrees.
    #[arg(
        long,
        value_delimiter = ',',
        num_args = 1,
        allow_hyphen_values = true,
        required = true
    )]
    angles: Vec<f64>,
}

#[derive(Args, Debug)]
struct BellArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    angles: AnglesArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FrontierArg {
    Above,
    Below,
}

#[derive(Args, Debug)]
#[group(id = "speeds", required = true, multiple = false, args = ["betas", "beta_range"])]
struct ScanArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    process: u8,
    #[command(flatten)]
    angles: AnglesArg,
    /// Comma-separated speeds.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    betas: Option<Vec<f64>>,
    /// Evenly spaced speeds: start,stop,count.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    beta_range: Option<Vec<String>>,
    /// Also locate the speed at which the violation in this direction ends.
    #[arg(long, value_enum)]
    frontier: Option<FrontierArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LevelArg {
    Integrals,
    DeltaLimit,
    Amplitude,
    Process2Angular,
    All,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_enum, default_value = "all")]
    level: LevelArg,
    #[arg(long)]
    integral_rel: Option<f64>,
    #[arg(long)]
    identity_rel: Option<f64>,
    #[arg(long)]
    window_rel: Option<f64>,
    #[arg(long)]
    delta_limit_abs: Option<f64>,
    #[arg(long)]
    amplitude_rel: Option<f64>,
    #[arg(long)]
    angular_fit_rel: Option<f64>,
    #[arg(long)]
    angular_prob_abs: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveArg {
    Min,
    Max,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    /// Grid points per angle over [0°, 180°).
    #[arg(long, default_value_t = 24)]
    grid_points: usize,
    #[arg(long, default_value_t = 200)]
    refine_iterations: usize,
    /// Initial compass step in degrees.
    #[arg(long, default_value_t = 5.0)]
    initial_step_deg: f64,
    /// Rotation of the grid in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    grid_offset_deg: f64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    angles: AnglesArg,
    /// Draws per setting.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    shards: usize,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (report, failure) = match cli.command {
        Command::Prob(a) => (commands::prob(&a)?, None),
        Command::Bell(a) => (commands::bell(&a)?, None),
        Command::Scan(a) => (commands::scan(&a)?, None),
        Command::Oracle(a) => commands::oracle(&a)?,
        Command::Search(a) => (commands::search(&a)?, None),
        Command::Simulate(a) => (commands::simulate(&a)?, None),
    };
    report.emit(cli.format, cli.output.as_deref())?;
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polcorr: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_angles_parse() {
        let cli = Cli::try_parse_from([
            "polcorr",
            "bell",
            "--process",
            "1",
            "--beta",
            "0",
            "--angles",
            "-10,20,-30.5,40",
        ])
        .unwrap();
        match cli.command {
            Command::Bell(b) => assert_eq!(b.angles.angles, vec![-10.0, 20.0, -30.5, 40.0]),
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn scan_requires_speeds() {
        let r = Cli::try_parse_from([
            "polcorr",
            "scan",
            "--process",
            "2",
            "--angles",
            "0,23,45,67",
        ]);
        assert!(r.is_err());
    }
}

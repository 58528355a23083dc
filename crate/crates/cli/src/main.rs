use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mspredict_cli::{
    load_config, CliError, ExperimentConfig, Format, ModelKind, ModelParams, SweepSpec, EXIT_OK,
};
use mspredict_core::dynamics::DEFAULT_STEPS;

#[derive(Parser)]
#[command(
    name = "mspredict",
    version,
    about = "Sweep optimal predictors of observable changes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Propagator steps (driven qubit only).
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a TOML config file.
    Run { config: PathBuf },
    /// Sweep the driven qubit over the final time tau.
    DrivenQubit(DrivenArgs),
    /// Sweep the avoided-crossing protocol over the coherence angle theta.
    AvoidedCrossing(CrossingArgs),
}

#[derive(Args)]
struct Range {
    #[arg(long)]
    start: Option<f64>,
    #[arg(long)]
    stop: Option<f64>,
    #[arg(long, default_value_t = 301)]
    count: usize,
}

#[derive(Args)]
struct DrivenArgs {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.3)]
    big_omega: f64,
    #[arg(long, default_value_t = 0.3)]
    g: f64,
    #[arg(long, default_value_t = 0.7)]
    s: f64,
    #[command(flatten)]
    range: Range,
}

#[derive(Args)]
struct CrossingArgs {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.9)]
    s: f64,
    #[command(flatten)]
    range: Range,
}

fn sweep(kind: ModelKind, range: &Range, default_stop: f64) -> SweepSpec {
    SweepSpec {
        variable: kind.sweep_variable().into(),
        start: range.start.unwrap_or(0.0),
        stop: range.stop.unwrap_or(default_stop),
        count: range.count,
    }
}

fn build(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.command {
        Command::Run { config } => load_config(config)?,
        Command::DrivenQubit(a) => ExperimentConfig {
            params: ModelParams::DrivenQubit {
                omega: a.omega,
                alpha: a.alpha,
                big_omega: a.big_omega,
                g: a.g,
                s: a.s,
            },
            sweep: sweep(ModelKind::DrivenQubit, &a.range, 30.0),
            output_path: None,
            steps: DEFAULT_STEPS,
        },
        Command::AvoidedCrossing(a) => ExperimentConfig {
            params: ModelParams::AvoidedCrossing {
                omega: a.omega,
                s: a.s,
            },
            sweep: sweep(ModelKind::AvoidedCrossing, &a.range, PI),
            output_path: None,
            steps: DEFAULT_STEPS,
        },
    };
    if let Some(steps) = cli.steps {
        cfg.steps = steps;
    }
    if let Some(path) = &cli.output {
        cfg.output_path = Some(path.clone());
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(&cli).and_then(|cfg| mspredict_cli::execute(&cfg, cli.format));
    match result {
        Ok(_) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

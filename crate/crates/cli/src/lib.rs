//! Parameter sweeps over the driven-qubit and avoided-crossing models, with
//! CSV or JSON output. The `mspredict` binary is a thin wrapper over this.

pub mod config;
pub mod output;
pub mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub use config::{
    validate_config, ConfigIssue, ExperimentConfig, ModelKind, ModelParams, SweepSpec,
};
pub use output::{format_float, write_csv, write_json, Format};
pub use sweep::{run_sweep, SweepRow};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for configuration and usage errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when computed rows break a numerical invariant.
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", format_issues(.0))]
    Config(Vec<ConfigIssue>),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("model evaluation failed: {0}")]
    Model(#[from] mspredict_core::Error),
    #[error("numerical invariants violated:\n  {}", .0.join("\n  "))]
    Invariant(Vec<String>),
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Model(_) => EXIT_INVARIANT,
            _ => EXIT_CONFIG,
        }
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    validate_config(&text).map_err(CliError::Config)
}

pub fn render<W: Write>(
    cfg: &ExperimentConfig,
    rows: &[SweepRow],
    format: Format,
    out: W,
) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(cfg.model().name(), &cfg.sweep.variable, rows, out),
    }
}

/// Validates, sweeps, writes the result to the configured path (or stdout)
/// and then checks every row. Output is written even when a row fails its
/// checks, so the offending values can be inspected.
pub fn execute(cfg: &ExperimentConfig, format: Format) -> Result<Vec<SweepRow>, CliError> {
    let issues = cfg.check();
    if !issues.is_empty() {
        return Err(CliError::Config(issues));
    }
    let rows = run_sweep(cfg)?;
    match &cfg.output_path {
        Some(path) => {
            let write_err = |source| CliError::Write {
                path: path.clone(),
                source,
            };
            let file = File::create(path).map_err(write_err)?;
            let mut out = BufWriter::new(file);
            render(cfg, &rows, format, &mut out).map_err(write_err)?;
            out.flush().map_err(write_err)?;
        }
        None => {
            let stdout = io::stdout();
            render(cfg, &rows, format, stdout.lock()).map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
        }
    }
    let violations: Vec<String> = rows.iter().flat_map(SweepRow::violations).collect();
    if violations.is_empty() {
        Ok(rows)
    } else {
        Err(CliError::Invariant(violations))
    }
}

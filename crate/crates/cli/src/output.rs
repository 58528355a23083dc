//! CSV and JSON writers for sweep results.

use std::io::{self, Write};

use serde::Serialize;

use crate::sweep::SweepRow;

/// Significant digits used for every float in CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `%.12g`-style formatting: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header for the given outcome labels (already sorted). Cells holding a
/// comma, as composed labels do, are quoted.
pub fn csv_header(labels: &[&str]) -> String {
    let mut cols = vec!["sweep_value".to_string()];
    cols.extend(labels.iter().map(|l| quote(&format!("p_gamma_{l}"))));
    cols.extend(labels.iter().map(|l| quote(&format!("pred_{l}"))));
    cols.extend(["avg_change", "var_true", "var_pred", "mse"].map(String::from));
    cols.join(",")
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    let labels: Vec<&str> = rows
        .first()
        .map(|r| r.outcomes.iter().map(|o| o.label.as_str()).collect())
        .unwrap_or_default();
    writeln!(out, "{}", csv_header(&labels))?;
    for row in rows {
        let mut cells = vec![format_float(row.sweep_value)];
        cells.extend(row.outcomes.iter().map(|o| format_float(o.probability)));
        cells.extend(
            row.outcomes
                .iter()
                .map(|o| o.prediction.map(format_float).unwrap_or_default()),
        );
        cells.extend([row.avg_change, row.var_true, row.var_pred, row.mse].map(format_float));
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    model: &'a str,
    variable: &'a str,
    rows: &'a [SweepRow],
}

pub fn write_json<W: Write>(
    model: &str,
    variable: &str,
    rows: &[SweepRow],
    mut out: W,
) -> io::Result<()> {
    let doc = JsonDocument {
        model,
        variable,
        rows,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)
}

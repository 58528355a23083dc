//! Evaluating a model over a grid of one parameter.

use mspredict_core::{
    avoided_crossing_model, driven_qubit_model, AvoidedCrossingParams, DrivenQubitParams,
    ProcessModel,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ModelParams};

/// Largest completeness defect accepted before a sweep is flagged.
pub const MAX_COMPLETENESS_DEFECT: f64 = 1e-6;
/// Tolerance for the mean and MSE identities on each row.
pub const ROW_IDENTITY_TOL: f64 = 1e-8;
/// Most negative MSE tolerated from roundoff.
pub const MSE_FLOOR: f64 = -1e-10;

/// Per-outcome entry of a row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeColumn {
    pub label: String,
    pub probability: f64,
    /// `None` when the outcome has no probability mass.
    pub prediction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    /// Sorted by label.
    pub outcomes: Vec<OutcomeColumn>,
    pub avg_change: f64,
    pub var_true: f64,
    pub var_pred: f64,
    pub mse: f64,
    #[serde(skip)]
    pub completeness_defect: f64,
}

impl SweepRow {
    /// Broken invariants on this row, as readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let at = self.sweep_value;
        if self.completeness_defect > MAX_COMPLETENESS_DEFECT {
            out.push(format!(
                "at {at}: completeness defect {:e}",
                self.completeness_defect
            ));
        }
        let total: f64 = self.outcomes.iter().map(|o| o.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            out.push(format!("at {at}: probabilities sum to {total}"));
        }
        let mean: f64 = self
            .outcomes
            .iter()
            .filter_map(|o| o.prediction.map(|v| v * o.probability))
            .sum();
        if (mean - self.avg_change).abs() > ROW_IDENTITY_TOL {
            out.push(format!(
                "at {at}: predictor mean {mean} differs from average {}",
                self.avg_change
            ));
        }
        let gap = self.var_true - self.var_pred;
        if (self.mse - gap).abs() > ROW_IDENTITY_TOL {
            out.push(format!(
                "at {at}: mse {} differs from variance gap {gap}",
                self.mse
            ));
        }
        if self.mse < MSE_FLOOR {
            out.push(format!("at {at}: negative mse {}", self.mse));
        }
        out
    }
}

/// Builds the model at one value of the swept variable.
pub fn build_model(
    params: &ModelParams,
    value: f64,
    steps: usize,
) -> mspredict_core::Result<ProcessModel> {
    match *params {
        ModelParams::DrivenQubit {
            omega,
            alpha,
            big_omega,
            g,
            s,
        } => driven_qubit_model(&DrivenQubitParams {
            omega,
            alpha,
            big_omega,
            g,
            s,
            tau: value,
            steps,
        }),
        ModelParams::AvoidedCrossing { omega, s } => {
            avoided_crossing_model(&AvoidedCrossingParams {
                omega,
                s,
                theta: value,
            })
        }
    }
}

pub fn evaluate_point(cfg: &ExperimentConfig, value: f64) -> mspredict_core::Result<SweepRow> {
    let analysis = build_model(&cfg.params, value, cfg.steps)?.analyze()?;
    let mut outcomes: Vec<OutcomeColumn> = analysis
        .table
        .rows()
        .iter()
        .map(|r| OutcomeColumn {
            label: r.label.clone(),
            probability: r.prob,
            prediction: r.value,
        })
        .collect();
    outcomes.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(SweepRow {
        sweep_value: value,
        outcomes,
        avg_change: analysis.avg_change,
        var_true: analysis.var_true,
        var_pred: analysis.var_pred,
        mse: analysis.mse,
        completeness_defect: analysis.completeness_defect,
    })
}

/// One row per sweep point in ascending order. Points are evaluated in
/// parallel; each is computed independently, so the result does not depend
/// on scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> mspredict_core::Result<Vec<SweepRow>> {
    cfg.sweep
        .points()
        .into_par_iter()
        .map(|v| evaluate_point(cfg, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ModelKind, SweepSpec};

    fn cfg(kind: ModelKind, start: f64, stop: f64, count: usize) -> ExperimentConfig {
        ExperimentConfig {
            params: ModelParams::reference(kind),
            sweep: SweepSpec {
                variable: kind.sweep_variable().into(),
                start,
                stop,
                count,
            },
            output_path: None,
            steps: 200,
        }
    }

    #[test]
    fn avoided_crossing_starts_with_zero_error() {
        let rows = run_sweep(&cfg(
            ModelKind::AvoidedCrossing,
            0.0,
            std::f64::consts::PI,
            65,
        ))
        .unwrap();
        assert_eq!(rows.len(), 65);
        assert!(rows[0].mse.abs() < 1e-10);
        assert!(rows.iter().all(|r| r.violations().is_empty()));
        assert!(rows.windows(2).all(|w| w[0].sweep_value < w[1].sweep_value));
    }

    #[test]
    fn tiny_times_look_like_identity() {
        for row in run_sweep(&cfg(ModelKind::DrivenQubit, 0.0, 1e-9, 5)).unwrap() {
            assert!((row.outcomes[0].probability - 1.0).abs() < 1e-12);
            assert!(row.outcomes[0].prediction.unwrap().abs() < 1e-8);
            assert!(row.violations().is_empty());
        }
    }

    #[test]
    fn violations_are_detected() {
        let mut row = evaluate_point(&cfg(ModelKind::AvoidedCrossing, 0.0, 1.0, 2), 0.5).unwrap();
        assert!(row.violations().is_empty());
        row.mse += 1e-6;
        row.completeness_defect = 1e-3;
        assert_eq!(row.violations().len(), 2);
    }
}

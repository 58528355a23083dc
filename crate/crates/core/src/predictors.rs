//! Optimal mean-square predictors of `ΔG` from ancilla outcomes.
//!
//! The closed forms here work directly with Kraus operators:
//!
//! ```text
//! ΔG_opt(γ) = tr[ρ (M_γ† G_τ M_γ − ½{M_γ† M_γ, G_0})] / P(γ)
//! ```
//!
//! with `G_0` replaced by its dephased version `𝔻(G_0)` (in the eigenbasis of
//! `ρ`) when the initial state carries coherence. [`conditional_mean_oracle`]
//! computes the same quantity the slow way, as `E[ΔG | γ]` over an explicit
//! joint distribution, and is what the closed forms are tested against.

use std::collections::{BTreeMap, HashMap};

use crate::distributions::{
    commutator_defect, moments, select_components, state_ensemble, JointDistribution, Moments,
    TpmOptions,
};
use crate::error::{Error, Result};
use crate::linalg::{Basis, DenseOperator, DensityMatrix, Observable};
use crate::unravelling::{clamp_probability, KrausSet};

/// Outcomes with `P(γ)` below this have no defined conditional mean.
pub const TOL_NULL_OUTCOME: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorRow {
    pub label: String,
    pub prob: f64,
    /// `None` when the outcome has (numerically) zero probability.
    pub value: Option<f64>,
}

/// Predicted value for each outcome, with the outcome probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorTable {
    rows: Vec<PredictorRow>,
}

impl PredictorTable {
    pub fn new(rows: Vec<PredictorRow>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[PredictorRow] {
        &self.rows
    }

    pub fn row(&self, label: &str) -> Option<&PredictorRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn value(&self, label: &str) -> Option<f64> {
        self.row(label).and_then(|r| r.value)
    }

    /// Mean and variance of the predictor over the outcome distribution.
    pub fn moments(&self) -> Moments {
        moments(
            self.rows
                .iter()
                .filter_map(|r| r.value.map(|v| (v, r.prob))),
        )
    }
}

/// Anything that assigns a prediction to an outcome label.
pub trait Predictor {
    fn predict(&self, label: &str) -> Option<f64>;
}

impl Predictor for PredictorTable {
    fn predict(&self, label: &str) -> Option<f64> {
        self.value(label)
    }
}

impl Predictor for BTreeMap<String, f64> {
    fn predict(&self, label: &str) -> Option<f64> {
        self.get(label).copied()
    }
}

impl Predictor for HashMap<String, f64> {
    fn predict(&self, label: &str) -> Option<f64> {
        self.get(label).copied()
    }
}

/// `sum (predict(γ) - ΔG)^2 P(ΔG, γ)` over outcomes that carry probability.
pub fn mse<P: Predictor + ?Sized>(predictor: &P, j: &JointDistribution) -> Result<f64> {
    let mut values: HashMap<String, Option<f64>> = HashMap::new();
    for (label, p) in j.label_marginal() {
        let value = if p < TOL_NULL_OUTCOME {
            None
        } else {
            Some(
                predictor
                    .predict(&label)
                    .ok_or_else(|| Error::MissingOutcome(label.clone()))?,
            )
        };
        values.insert(label, value);
    }
    Ok(j.atoms()
        .iter()
        .filter_map(|a| values[&a.label].map(|v| (v - a.delta).powi(2) * a.prob))
        .sum())
}

fn check_dims(k: &KrausSet, rho: &DensityMatrix, g0: &Observable, gt: &Observable) -> Result<()> {
    for actual in [rho.dim(), g0.dim(), gt.dim()] {
        if actual != k.dim() {
            return Err(Error::DimensionMismatch {
                expected: k.dim(),
                actual,
            });
        }
    }
    Ok(())
}

/// The closed-form predictor for a given (possibly dephased) initial observable.
fn closed_form(
    k: &KrausSet,
    rho: &DensityMatrix,
    initial: &DenseOperator,
    last: &DenseOperator,
) -> Result<PredictorTable> {
    let rows = k
        .elements()
        .iter()
        .map(|e| {
            let m_dag = e.op.adjoint();
            let povm = &m_dag * &e.op;
            let prob = clamp_probability(&e.label, povm.trace_product(rho.op()).re)?;
            let value = if prob < TOL_NULL_OUTCOME {
                None
            } else {
                let gain = &(&m_dag * last) * &e.op;
                let loss = povm.anticommutator(initial).scale_real(0.5);
                Some((&gain - &loss).trace_product(rho.op()).re / prob)
            };
            Ok(PredictorRow {
                label: e.label.clone(),
                prob,
                value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictorTable::new(rows))
}

/// Optimal predictor for an initial state commuting with `G_0`.
pub fn optimal_predictor(
    k: &KrausSet,
    rho: &DensityMatrix,
    g0: &Observable,
    gt: &Observable,
) -> Result<PredictorTable> {
    optimal_predictor_with(k, rho, g0, gt, &TpmOptions::default())
}

pub fn optimal_predictor_with(
    k: &KrausSet,
    rho: &DensityMatrix,
    g0: &Observable,
    gt: &Observable,
    opts: &TpmOptions,
) -> Result<PredictorTable> {
    check_dims(k, rho, g0, gt)?;
    let defect = commutator_defect(g0, rho);
    if defect >= opts.commutator_tol {
        return Err(Error::NonCommuting { defect });
    }
    closed_form(k, rho, g0.op(), gt.op())
}

/// Optimal predictor under the QBN joint distribution: `G_0` is dephased in
/// the eigenbasis of `rho` (`rho_basis`, or the state's own eigenvectors when
/// its populated spectrum is non-degenerate).
pub fn optimal_predictor_coherent(
    k: &KrausSet,
    rho: &DensityMatrix,
    rho_basis: Option<&Basis>,
    g0: &Observable,
    gt: &Observable,
) -> Result<PredictorTable> {
    check_dims(k, rho, g0, gt)?;
    let ensemble = state_ensemble(rho, rho_basis)?;
    let basis = Basis::complete(ensemble.into_iter().map(|(_, v)| v).collect())?;
    let dephased = dephase(g0.op(), &basis)?;
    closed_form(k, rho, &dephased, gt.op())
}

/// `𝔻(X) = sum_a |psi_a><psi_a| X |psi_a><psi_a|` for a complete orthonormal basis.
pub fn dephase(g: &DenseOperator, basis: &Basis) -> Result<DenseOperator> {
    if basis.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            actual: basis.dim(),
        });
    }
    if basis.len() != g.dim() {
        return Err(Error::IncompleteBasis {
            len: basis.len(),
            dim: g.dim(),
        });
    }
    Ok(basis
        .iter()
        .fold(DenseOperator::zeros(g.dim()), |acc, psi| {
            let weight = g.sandwich(psi, psi);
            &acc + &DenseOperator::outer(psi, psi).scale(weight)
        }))
}

/// Conditional mean `E[ΔG | γ]` read off a joint distribution.
pub fn conditional_mean_oracle(j: &JointDistribution) -> PredictorTable {
    let rows = j
        .labels()
        .iter()
        .map(|label| {
            let (prob, first) = j
                .atoms()
                .iter()
                .filter(|a| a.label == *label)
                .fold((0.0, 0.0), |(p, m), a| (p + a.prob, m + a.delta * a.prob));
            PredictorRow {
                label: label.clone(),
                prob,
                value: (prob >= TOL_NULL_OUTCOME).then(|| first / prob),
            }
        })
        .collect();
    PredictorTable::new(rows)
}

/// Predictor when only some components of a composite outcome string are seen.
///
/// Averages the full-record predictor over the hidden components with weights
/// `P(γ_hidden | γ_observed)` taken from the joint distribution.
pub fn marginal_predictor(
    p: &PredictorTable,
    j: &JointDistribution,
    observed: &[usize],
) -> Result<PredictorTable> {
    let mut order: Vec<String> = Vec::new();
    let mut sums: HashMap<String, (f64, f64)> = HashMap::new();
    for (label, prob) in j.label_marginal() {
        let coarse = select_components(&label, observed)?;
        let entry = sums.entry(coarse.clone()).or_insert_with(|| {
            order.push(coarse);
            (0.0, 0.0)
        });
        entry.0 += prob;
        if prob >= TOL_NULL_OUTCOME {
            let value = p
                .value(&label)
                .ok_or_else(|| Error::MissingOutcome(label.clone()))?;
            entry.1 += prob * value;
        }
    }
    let rows = order
        .into_iter()
        .map(|label| {
            let (prob, weighted) = sums[&label];
            PredictorRow {
                label,
                prob,
                value: (prob >= TOL_NULL_OUTCOME).then(|| weighted / prob),
            }
        })
        .collect();
    Ok(PredictorTable::new(rows))
}

/// `W_opt(γ) = Q(γ) + ΔG_opt(γ)`.
pub fn work_predictor(dg: &PredictorTable, heat: &BTreeMap<String, f64>) -> Result<PredictorTable> {
    let rows = dg
        .rows
        .iter()
        .map(|r| {
            let q = heat
                .get(&r.label)
                .ok_or_else(|| Error::MissingHeat(r.label.clone()))?;
            Ok(PredictorRow {
                label: r.label.clone(),
                prob: r.prob,
                value: r.value.map(|v| v + q),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictorTable::new(rows))
}

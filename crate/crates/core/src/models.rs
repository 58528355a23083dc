//! Builders for the two reference experiments: a driven qubit exchanging
//! excitations with an ancilla qubit, and the avoided-crossing work protocol.
//!
//! Conventions: `|0>` is the `sigma_z = +1` state, `sigma_+ = |0><1|` and the
//! joint space is ordered `system ⊗ ancilla`. The SWAP maps `|ab>` to `|ba>`.

use std::collections::BTreeMap;

use crate::distributions::{
    average_change, commutator_defect, joint_tpm, qbn_joint, JointDistribution, TOL_COMMUTE,
};
use crate::dynamics::{propagate, PropagatorConfig, TimeDependentHamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{
    expm_i_hermitian, kron, pauli, Basis, DenseOperator, DensityMatrix, Observable,
};
use crate::predictors::{
    mse, optimal_predictor, optimal_predictor_coherent, work_predictor, PredictorTable,
};
use crate::unravelling::{kraus_from_unitary, KrausSet};

/// Everything needed to predict `ΔG` for one process.
#[derive(Debug, Clone)]
pub struct ProcessModel {
    pub kraus: KrausSet,
    pub rho: DensityMatrix,
    /// Eigenbasis of `rho` to use when it is degenerate.
    pub rho_basis: Option<Basis>,
    pub g0: Observable,
    pub gt: Observable,
    /// Heat `Q(γ)` released to the ancilla; when present the analysis is of work `Q + ΔG`.
    pub heat: Option<BTreeMap<String, f64>>,
}

/// Predictor and error figures for one model.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub table: PredictorTable,
    pub joint: JointDistribution,
    /// Whether the coherent (QBN) path was used.
    pub coherent: bool,
    pub avg_change: f64,
    pub var_true: f64,
    pub var_pred: f64,
    pub mse: f64,
    pub completeness_defect: f64,
}

impl ProcessModel {
    /// Runs the optimal predictor. States commuting with `G_0` take the TPM
    /// path, others the QBN path; with a heat map the results refer to work.
    pub fn analyze(&self) -> Result<Analysis> {
        let coherent = commutator_defect(&self.g0, &self.rho) >= TOL_COMMUTE;
        let (mut table, mut joint) = if coherent {
            let basis = self.rho_basis.as_ref();
            (
                optimal_predictor_coherent(&self.kraus, &self.rho, basis, &self.g0, &self.gt)?,
                qbn_joint(&self.kraus, &self.rho, basis, &self.g0, &self.gt)?,
            )
        } else {
            (
                optimal_predictor(&self.kraus, &self.rho, &self.g0, &self.gt)?,
                joint_tpm(&self.kraus, &self.rho, &self.g0, &self.gt)?,
            )
        };
        let mut avg_change = average_change(&self.kraus, &self.rho, &self.g0, &self.gt)?;
        if let Some(heat) = &self.heat {
            table = work_predictor(&table, heat)?;
            joint = joint.shifted(heat)?;
            for row in table.rows() {
                avg_change += row.prob * heat[&row.label];
            }
        }
        let error = mse(&table, &joint)?;
        Ok(Analysis {
            var_true: joint.moments().variance,
            var_pred: table.moments().variance,
            mse: error,
            completeness_defect: self.kraus.completeness_defect(),
            table,
            joint,
            coherent,
            avg_change,
        })
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}

fn check_population(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "s",
            reason: format!("must lie in [0, 1], got {s}"),
        })
    }
}

fn swap() -> DenseOperator {
    DenseOperator::from_real(&[
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    ])
    .expect("static matrix")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenQubitParams {
    pub omega: f64,
    pub alpha: f64,
    pub big_omega: f64,
    pub g: f64,
    pub s: f64,
    pub tau: f64,
    pub steps: usize,
}

impl DrivenQubitParams {
    /// `omega = alpha = 1`, `g = Omega = 0.3`, `s = 0.7`.
    pub fn reference(tau: f64) -> Self {
        Self {
            omega: 1.0,
            alpha: 1.0,
            big_omega: 0.3,
            g: 0.3,
            s: 0.7,
            tau,
            steps: crate::dynamics::DEFAULT_STEPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("omega", self.omega)?;
        check_finite("alpha", self.alpha)?;
        check_finite("big_omega", self.big_omega)?;
        check_finite("g", self.g)?;
        check_finite("tau", self.tau)?;
        check_population(self.s)?;
        if self.tau < 0.0 {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("must be non-negative, got {}", self.tau),
            });
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter {
                name: "steps",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// `H_S(t) = omega sigma_z + alpha sin(Omega t) sigma_x`.
    pub fn system_hamiltonian(&self, t: f64) -> DenseOperator {
        &pauli::z().scale_real(self.omega)
            + &pauli::x().scale_real(self.alpha * (self.big_omega * t).sin())
    }

    /// Joint Hamiltonian with ancilla term `omega sigma_z^A` and exchange
    /// coupling `g (sigma_+ sigma_- + sigma_- sigma_+)`.
    pub fn joint_hamiltonian(&self) -> TimeDependentHamiltonian {
        let p = *self;
        let id = DenseOperator::identity(2);
        let ancilla = kron(&id, &pauli::z().scale_real(p.omega));
        let exchange = (&kron(&pauli::plus(), &pauli::minus())
            + &kron(&pauli::minus(), &pauli::plus()))
            .scale_real(p.g);
        let fixed = &ancilla + &exchange;
        TimeDependentHamiltonian::new(4, move |t| &kron(&p.system_hamiltonian(t), &id) + &fixed)
    }
}

/// Driven qubit measured through an exchange-coupled ancilla qubit prepared
/// in `|0>` and read out in the computational basis. `G_t = H_S(t)`.
pub fn driven_qubit_model(p: &DrivenQubitParams) -> Result<ProcessModel> {
    p.validate()?;
    let u = propagate(
        &p.joint_hamiltonian(),
        PropagatorConfig::new(p.tau).with_steps(p.steps),
    )?;
    let kraus = kraus_from_unitary(&u, 2, 2, 0, &Basis::computational(2))?;
    Ok(ProcessModel {
        kraus,
        rho: DensityMatrix::diagonal(&[p.s, 1.0 - p.s])?,
        rho_basis: Some(Basis::computational(2)),
        g0: Observable::new(p.system_hamiltonian(0.0))?,
        gt: Observable::new(p.system_hamiltonian(p.tau))?,
        heat: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvoidedCrossingParams {
    pub omega: f64,
    pub s: f64,
    pub theta: f64,
}

impl AvoidedCrossingParams {
    pub fn validate(&self) -> Result<()> {
        check_finite("omega", self.omega)?;
        check_finite("theta", self.theta)?;
        check_population(self.s)
    }
}

/// Work pulse `sigma_x` followed by a resonant SWAP into a ground-state
/// ancilla, with the ancilla read out in the computational basis.
///
/// The system Hamiltonian is `omega |1><1|` (ground state `|0>`, matching the
/// ancilla), and the initial state is `e^{-i theta sigma_y/2} (s|0><0| +
/// (1-s)|1><1|) e^{i theta sigma_y/2}`. Outcome `"1"` means the ancilla
/// absorbed an excitation, so `Q("1") = omega` and `Q("0") = 0`.
pub fn avoided_crossing_model(p: &AvoidedCrossingParams) -> Result<ProcessModel> {
    p.validate()?;
    let id = DenseOperator::identity(2);
    let u = &swap() * &kron(&pauli::x(), &id);
    let kraus = kraus_from_unitary(&u, 2, 2, 0, &Basis::computational(2))?;
    let rotation = expm_i_hermitian(&pauli::y(), p.theta / 2.0)?;
    let rho = DensityMatrix::diagonal(&[p.s, 1.0 - p.s])?.rotated(&rotation)?;
    let h = Observable::new(DenseOperator::diagonal(&[0.0, p.omega]))?;
    let heat = [("0".to_string(), 0.0), ("1".to_string(), p.omega)]
        .into_iter()
        .collect();
    Ok(ProcessModel {
        kraus,
        rho,
        rho_basis: Some(Basis::from_unitary_columns(&rotation)?),
        g0: h.clone(),
        gt: h,
        heat: Some(heat),
    })
}

//! Optimal mean-square predictors for changes of a system observable,
//! inferred from ancilla measurement outcomes.
//!
//! The pipeline is: build a joint unitary ([`dynamics`]), extract a Kraus
//! unravelling ([`unravelling`]), then form the joint statistics of the
//! observable change and the outcome ([`distributions`]) and the predictor
//! that minimizes the mean-squared error ([`predictors`]). [`models`] holds
//! ready-made builders for a driven qubit and an avoided-crossing protocol.

pub mod distributions;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod models;
pub mod predictors;
pub mod random;
pub mod unravelling;

pub use distributions::{
    average_change, joint_tpm, moments, qbn_joint, tpm_distribution, Distribution,
    JointDistribution, Moments,
};
pub use dynamics::{propagate, PropagatorConfig, TimeDependentHamiltonian};
pub use error::{Error, Result};
pub use linalg::{
    eig_hermitian, expm_i_hermitian, kron, partial_trace, Basis, DenseOperator, DensityMatrix,
    Keep, Observable, Spectrum, C64,
};
pub use models::{
    avoided_crossing_model, driven_qubit_model, Analysis, AvoidedCrossingParams, DrivenQubitParams,
    ProcessModel,
};
pub use predictors::{
    conditional_mean_oracle, dephase, marginal_predictor, mse, optimal_predictor,
    optimal_predictor_coherent, work_predictor, Predictor, PredictorRow, PredictorTable,
};
pub use unravelling::{
    apply_channel, completeness_defect, compose, kraus_from_unitary, outcome_probabilities,
    KrausSet,
};

//! Time-ordered propagators for time-dependent Hamiltonians (ℏ = 1).

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{expm_i_hermitian, DenseOperator};

pub const DEFAULT_STEPS: usize = 2000;

/// A Hamiltonian `H(t)` on a fixed-dimension space.
pub struct TimeDependentHamiltonian {
    dim: usize,
    evaluate: Box<dyn Fn(f64) -> DenseOperator + Send + Sync>,
}

impl TimeDependentHamiltonian {
    pub fn new(
        dim: usize,
        evaluate: impl Fn(f64) -> DenseOperator + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            evaluate: Box::new(evaluate),
        }
    }

    /// Wraps a time-independent operator.
    pub fn constant(h: DenseOperator) -> Self {
        Self::new(h.dim(), move |_| h.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `H(t)`, checked for dimension and Hermiticity.
    pub fn at(&self, t: f64) -> Result<DenseOperator> {
        let h = (self.evaluate)(t);
        h.ensure_dim(self.dim)?;
        h.ensure_hermitian()?;
        Ok(h)
    }
}

impl fmt::Debug for TimeDependentHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeDependentHamiltonian")
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    pub tau: f64,
    pub steps: usize,
}

impl PropagatorConfig {
    pub fn new(tau: f64) -> Self {
        Self {
            tau,
            steps: DEFAULT_STEPS,
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.tau.is_nan() || self.tau < 0.0 {
            return Err(Error::NegativeTime(self.tau));
        }
        if self.steps == 0 {
            return Err(Error::ZeroSteps);
        }
        Ok(())
    }
}

/// `U_tau` from `t = 0` to `cfg.tau` by the exponential midpoint rule.
pub fn propagate(h: &TimeDependentHamiltonian, cfg: PropagatorConfig) -> Result<DenseOperator> {
    cfg.validate()?;
    propagate_interval(h, 0.0, cfg.tau, cfg.steps)
}

/// Propagator from `start` to `end` using `steps` midpoint factors
/// `exp(-i H(t_k) dt)`, applied in time order.
pub fn propagate_interval(
    h: &TimeDependentHamiltonian,
    start: f64,
    end: f64,
    steps: usize,
) -> Result<DenseOperator> {
    if end.is_nan() || start.is_nan() || end < start {
        return Err(Error::NegativeTime(end - start));
    }
    if steps == 0 {
        return Err(Error::ZeroSteps);
    }
    let mut u = DenseOperator::identity(h.dim());
    if end == start {
        return Ok(u);
    }
    let dt = (end - start) / steps as f64;
    for k in 0..steps {
        let t_mid = start + (k as f64 + 0.5) * dt;
        let step = expm_i_hermitian(&h.at(t_mid)?, dt)?;
        u = &step * &u;
    }
    Ok(u)
}

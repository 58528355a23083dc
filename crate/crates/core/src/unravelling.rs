//! Kraus unravellings: extraction from a system–ancilla unitary, outcome
//! statistics, channel action and composition of measurement records.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{Basis, DenseOperator, DensityMatrix, TOL_RECONSTRUCT};

/// Completeness tolerance on `max |sum M^dag M - I|`.
pub const TOL_COMPLETE: f64 = 1e-8;
/// Outcome probabilities down to `-TOL_NEGATIVE` are treated as roundoff and clamped.
pub const TOL_NEGATIVE: f64 = 1e-12;

/// A labelled Kraus operator `M_gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausElement {
    pub label: String,
    pub op: DenseOperator,
}

/// An ordered set of Kraus operators on the system space.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim: usize,
    elements: Vec<KrausElement>,
}

impl KrausSet {
    /// Builds a complete set; fails if `sum M^dag M` misses the identity by more than [`TOL_COMPLETE`].
    pub fn new(elements: Vec<(String, DenseOperator)>) -> Result<Self> {
        let set = Self::unchecked_completeness(elements)?;
        let defect = set.completeness_defect();
        if defect > TOL_COMPLETE {
            return Err(Error::Incomplete { defect });
        }
        Ok(set)
    }

    /// Checks labels and dimensions only, allowing trace-decreasing sets.
    pub fn unchecked_completeness(elements: Vec<(String, DenseOperator)>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::EmptyKrausSet)?.1.dim();
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(elements.len());
        for (label, op) in elements {
            op.ensure_dim(dim)?;
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label));
            }
            out.push(KrausElement { label, op });
        }
        Ok(Self { dim, elements: out })
    }

    /// Labels elements `"0"`, `"1"`, ... in order.
    pub fn indexed(ops: Vec<DenseOperator>) -> Result<Self> {
        Self::new(
            ops.into_iter()
                .enumerate()
                .map(|(i, op)| (i.to_string(), op))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[KrausElement] {
        &self.elements
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|e| e.label.as_str())
    }

    pub fn get(&self, label: &str) -> Option<&DenseOperator> {
        self.elements
            .iter()
            .find(|e| e.label == label)
            .map(|e| &e.op)
    }

    /// POVM element `E_gamma = M^dag M` for each outcome.
    pub fn povm(&self) -> Vec<DenseOperator> {
        self.elements
            .iter()
            .map(|e| &e.op.adjoint() * &e.op)
            .collect()
    }

    pub fn completeness_defect(&self) -> f64 {
        completeness_defect(self)
    }

    pub(crate) fn ensure_dim(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: dim,
            })
        }
    }
}

/// `max |sum_gamma M^dag M - I|` entrywise.
pub fn completeness_defect(k: &KrausSet) -> f64 {
    let total = k
        .povm()
        .iter()
        .fold(DenseOperator::zeros(k.dim), |acc, e| &acc + e);
    total.max_abs_diff(&DenseOperator::identity(k.dim))
}

/// Kraus operators `M_gamma = (I ⊗ <gamma|) U (I ⊗ |prep>)` of a joint unitary
/// on `system ⊗ ancilla`, for an ancilla prepared in basis state `prep` and
/// measured in `meas_basis`. Labels are the indices into `meas_basis`.
pub fn kraus_from_unitary(
    u: &DenseOperator,
    dim_s: usize,
    dim_a: usize,
    prep: usize,
    meas_basis: &Basis,
) -> Result<KrausSet> {
    u.ensure_dim(dim_s * dim_a)?;
    let defect = u.unitarity_defect();
    if defect > TOL_RECONSTRUCT {
        return Err(Error::NotUnitary { defect });
    }
    if prep >= dim_a {
        return Err(Error::PrepOutOfRange {
            index: prep,
            dim: dim_a,
        });
    }
    if meas_basis.dim() != dim_a {
        return Err(Error::DimensionMismatch {
            expected: dim_a,
            actual: meas_basis.dim(),
        });
    }
    if meas_basis.len() != dim_a {
        return Err(Error::IncompleteBasis {
            len: meas_basis.len(),
            dim: dim_a,
        });
    }
    let elements = meas_basis
        .iter()
        .enumerate()
        .map(|(index, gamma)| {
            let op = DenseOperator::from_fn(dim_s, |i, j| {
                (0..dim_a)
                    .map(|a| gamma[a].conj() * u.get(i * dim_a + a, j * dim_a + prep))
                    .sum()
            });
            (index.to_string(), op)
        })
        .collect();
    KrausSet::new(elements)
}

/// `P(gamma) = tr(M rho M^dag)`, in the order of the set's elements.
pub fn outcome_probabilities(k: &KrausSet, rho: &DensityMatrix) -> Result<Vec<f64>> {
    k.ensure_dim(rho.dim())?;
    k.elements
        .iter()
        .map(|e| {
            let povm = &e.op.adjoint() * &e.op;
            let p = povm.trace_product(rho.op()).re;
            clamp_probability(&e.label, p)
        })
        .collect()
}

pub(crate) fn clamp_probability(label: &str, p: f64) -> Result<f64> {
    if p < -TOL_NEGATIVE {
        return Err(Error::NegativeProbability {
            label: label.to_owned(),
            prob: p,
        });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `sum_gamma M rho M^dag` without state validation.
pub(crate) fn channel_operator(k: &KrausSet, rho: &DenseOperator) -> DenseOperator {
    k.elements
        .iter()
        .fold(DenseOperator::zeros(k.dim), |acc, e| {
            &acc + &(&(&e.op * rho) * &e.op.adjoint())
        })
}

/// `Λ[rho] = sum_gamma M rho M^dag`.
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    k.ensure_dim(rho.dim())?;
    let out = channel_operator(k, rho.op()).hermitian_part();
    DensityMatrix::with_tolerance(out, TOL_RECONSTRUCT)
}

/// Concatenates measurement stages. The composite outcome `(g1, ..., gN)` has
/// operator `M_gN ... M_g1` and label `"g1,...,gN"`; the first stage varies fastest.
pub fn compose(stages: &[KrausSet]) -> Result<KrausSet> {
    let first = stages.first().ok_or(Error::EmptyKrausSet)?;
    for stage in stages {
        first.ensure_dim(stage.dim)?;
    }
    let mut acc: Vec<(Vec<&str>, DenseOperator)> = first
        .elements
        .iter()
        .map(|e| (vec![e.label.as_str()], e.op.clone()))
        .collect();
    for stage in &stages[1..] {
        let mut next = Vec::with_capacity(acc.len() * stage.len());
        for later in &stage.elements {
            for (labels, op) in &acc {
                let mut labels = labels.clone();
                labels.push(&later.label);
                next.push((labels, &later.op * op));
            }
        }
        acc = next;
    }
    KrausSet::new(
        acc.into_iter()
            .map(|(labels, op)| (labels.join(","), op))
            .collect(),
    )
}

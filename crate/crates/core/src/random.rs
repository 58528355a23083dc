//! Random states, unitaries and Kraus sets for property tests and benchmarks.

use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal};

use crate::linalg::{inner, Basis, DenseOperator, DensityMatrix, Observable, C64};
use crate::models::ProcessModel;
use crate::unravelling::{kraus_from_unitary, KrausSet};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DenseOperator {
    DenseOperator::from_fn(dim, |_, _| gaussian(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DenseOperator {
    ginibre(rng, dim).hermitian_part()
}

/// Haar-ish unitary from Gram–Schmidt on Gaussian columns.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DenseOperator {
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while columns.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        // two passes keep orthogonality at machine precision
        for _ in 0..2 {
            for u in &columns {
                let overlap = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= overlap * y;
                }
            }
        }
        let norm = inner(&v, &v).re.sqrt();
        if norm < 1e-6 {
            continue;
        }
        columns.push(v.into_iter().map(|z| z / norm).collect());
    }
    DenseOperator::from_fn(dim, |r, c| columns[c][r])
}

/// Random probability vector (flat Dirichlet).
pub fn populations<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// `sum_i p_i |b_i><b_i|` with random populations over the given basis.
pub fn state_in_basis<R: Rng + ?Sized>(rng: &mut R, basis: &Basis) -> DensityMatrix {
    let p = populations(rng, basis.len());
    let mut op = DenseOperator::zeros(basis.dim());
    for (w, v) in p.iter().zip(basis.iter()) {
        op = &op + &DenseOperator::outer(v, v).scale_real(*w);
    }
    DensityMatrix::with_tolerance(op.hermitian_part(), 1e-9).expect("convex mixture is a state")
}

/// Kraus set with `outcomes` elements, from a random unitary on `system ⊗ ancilla`.
pub fn kraus_set<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> KrausSet {
    let u = unitary(rng, dim * outcomes);
    kraus_from_unitary(&u, dim, outcomes, 0, &Basis::computational(outcomes))
        .expect("random unitary dilation")
}

/// Observable with a random eigenbasis. With `degenerate` the eigenvalues
/// are drawn from `{-1, 0, 1, 2}` so levels and gaps coincide.
pub fn observable<R: Rng + ?Sized>(rng: &mut R, dim: usize, degenerate: bool) -> Observable {
    if !degenerate {
        return Observable::new(hermitian(rng, dim)).expect("Hermitian by construction");
    }
    let v = unitary(rng, dim);
    let values: Vec<f64> = (0..dim).map(|_| rng.random_range(-1..=2) as f64).collect();
    let op = &(&v * &DenseOperator::diagonal(&values)) * &v.adjoint();
    Observable::new(op.hermitian_part()).expect("Hermitian by construction")
}

/// A random process: system dimension 2–4, 2–4 outcomes, random `G_0`, `G_tau`.
///
/// Incoherent models draw `rho` diagonal in the eigenbasis of `G_0`;
/// coherent ones rotate random populations by a random unitary and record
/// that basis in `rho_basis`.
pub fn model<R: Rng + ?Sized>(rng: &mut R, coherent: bool) -> ProcessModel {
    let dim = rng.random_range(2..=4);
    let outcomes = rng.random_range(2..=4);
    let degenerate = rng.random_bool(0.25);
    let g0 = observable(rng, dim, degenerate);
    let gt = observable(rng, dim, degenerate);
    let basis = if coherent {
        Basis::from_unitary_columns(&unitary(rng, dim)).expect("unitary columns")
    } else {
        Basis::complete(g0.spectrum().vectors.clone()).expect("eigenbasis")
    };
    let rho = state_in_basis(rng, &basis);
    ProcessModel {
        kraus: kraus_set(rng, dim, outcomes),
        rho,
        rho_basis: Some(basis),
        g0,
        gt,
        heat: None,
    }
}

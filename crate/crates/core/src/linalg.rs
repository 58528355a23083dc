//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here works on row-major square matrices of dimension up to a
//! few dozen. The Hermitian eigensolver is delegated to `nalgebra`; the
//! result is then put into a canonical order and phase so that spectra are
//! reproducible bit for bit.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `max |A - A^dag|` for an operator to count as Hermitian.
pub const TOL_HERMITIAN: f64 = 1e-10;
/// Tolerance on spectral reconstruction and basis orthonormality.
pub const TOL_RECONSTRUCT: f64 = 1e-9;
/// Tolerance for trace and positivity of density matrices.
pub const TOL_STATE: f64 = 1e-10;
/// Eigenvalues closer than this are treated as one level of an observable.
pub const TOL_LEVEL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<C64>,
}

impl DenseOperator {
    /// Builds an operator from row-major entries, checking shape and finiteness.
    pub fn new(data: Vec<C64>) -> Result<Self> {
        let len = data.len();
        if len == 0 {
            return Err(Error::EmptyOperator);
        }
        let dim = (len as f64).sqrt().round() as usize;
        if dim * dim != len {
            return Err(Error::NotSquare { len });
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds an operator from real row-major entries.
    pub fn from_real(data: &[f64]) -> Result<Self> {
        Self::new(data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |r, c| {
            if r == c {
                C64::new(values[r], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `|ket><bra|`
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        assert_eq!(ket.len(), bra.len(), "outer product of unequal lengths");
        Self::from_fn(ket.len(), |r, c| ket[r] * bra[c].conj())
    }

    /// Projector onto a single computational basis state.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        Self::from_fn(
            dim,
            |r, c| if r == index && c == index { ONE } else { ZERO },
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` entrywise. Panics on mismatched dimensions.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `max |U^dag U - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    /// `(A + A^dag) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        })
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// `A |v>`
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    /// `<u| A |v>`
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        inner(u, &self.apply(v))
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim, "trace_product on mismatched dims");
        let n = self.dim;
        let mut acc = ZERO;
        for r in 0..n {
            for k in 0..n {
                acc += self.get(r, k) * other.get(k, r);
            }
        }
        acc
    }

    pub(crate) fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                actual: self.dim,
            })
        }
    }

    pub(crate) fn ensure_hermitian(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect > TOL_HERMITIAN {
            Err(Error::NotHermitian { defect })
        } else {
            Ok(())
        }
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c))
    }
}

impl fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseOperator({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self.get(r, c);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;

    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim, "matrix product on mismatched dims");
        let n = self.dim;
        let mut out = DenseOperator::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.get(k, c);
                }
            }
        }
        out
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;

    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim, "sum on mismatched dims");
        DenseOperator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;

    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim, "difference on mismatched dims");
        DenseOperator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// `<u|v>`, conjugate-linear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    assert_eq!(u.len(), v.len(), "inner product of unequal lengths");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Computational basis vector `|index>`.
pub fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

/// Pauli and ladder matrices in the convention `|0> = (1, 0)`, `sigma_z |0> = |0>`.
pub mod pauli {
    use super::{DenseOperator, C64};

    pub fn x() -> DenseOperator {
        DenseOperator::from_real(&[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn y() -> DenseOperator {
        DenseOperator::new(vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ])
        .unwrap()
    }

    pub fn z() -> DenseOperator {
        DenseOperator::diagonal(&[1.0, -1.0])
    }

    /// `sigma_+ = |0><1|`, raising towards the `sigma_z = +1` state.
    pub fn plus() -> DenseOperator {
        DenseOperator::from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    /// `sigma_- = |1><0|`
    pub fn minus() -> DenseOperator {
        DenseOperator::from_real(&[0.0, 0.0, 1.0, 0.0]).unwrap()
    }
}

/// Tensor product `a ⊗ b`; the first factor is the slow index.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    let (na, nb) = (a.dim, b.dim);
    DenseOperator::from_fn(na * nb, |r, c| {
        a.get(r / nb, c / nb) * b.get(r % nb, c % nb)
    })
}

/// Which factor of a bipartite space survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of an operator on `C^dim_a ⊗ C^dim_b`.
pub fn partial_trace(m: &DenseOperator, dims: (usize, usize), keep: Keep) -> Result<DenseOperator> {
    let (da, db) = dims;
    m.ensure_dim(da * db)?;
    let out = match keep {
        Keep::First => DenseOperator::from_fn(da, |i, j| {
            (0..db).map(|k| m.get(i * db + k, j * db + k)).sum()
        }),
        Keep::Second => DenseOperator::from_fn(db, |k, l| {
            (0..da).map(|i| m.get(i * db + k, i * db + l)).sum()
        }),
    };
    Ok(out)
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_k f(lambda_k) |v_k><v_k|`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> DenseOperator {
        let n = self.vectors.first().map_or(0, Vec::len);
        let mut out = DenseOperator::zeros(n);
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(lambda);
            for (r, vr) in v.iter().enumerate() {
                let left = w * vr;
                for (c, vc) in v.iter().enumerate() {
                    let z = out.get(r, c) + left * vc.conj();
                    out.set(r, c, z);
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> DenseOperator {
        self.reconstruct_with(|lambda| C64::new(lambda, 0.0))
    }
}

fn normalize_phase(v: &mut [C64]) {
    if let Some(lead) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let phase = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
        // pin the leading component exactly on the real axis
        if let Some(z) = v.iter_mut().find(|z| z.norm() > 1e-12) {
            *z = C64::new(z.norm(), 0.0);
        }
    }
}

fn lexicographic(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

fn is_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// Hermitian eigendecomposition with canonical ordering and phases.
pub fn eig_hermitian(h: &DenseOperator) -> Result<Spectrum> {
    h.ensure_hermitian()?;
    let eig = h.hermitian_part().to_nalgebra().symmetric_eigen();
    let n = h.dim;
    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            normalize_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    // runs of tied eigenvalues are ordered by descending lexicographic
    // eigenvector, which keeps a diagonal degenerate block in computational order
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && is_tie(pairs[end - 1].0, pairs[end].0) {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1).reverse());
        }
        start = end;
    }

    let (values, vectors) = pairs.into_iter().unzip();
    Ok(Spectrum { values, vectors })
}

/// `exp(-i h t)` for Hermitian `h`.
pub fn expm_i_hermitian(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    let spectrum = eig_hermitian(h)?;
    Ok(spectrum.reconstruct_with(|lambda| C64::new(0.0, -lambda * t).exp()))
}

/// An orthonormal set of vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    vectors: Vec<Vec<C64>>,
}

impl Basis {
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
        }
        let mut defect = 0.0_f64;
        for (a, u) in vectors.iter().enumerate() {
            for (b, v) in vectors.iter().enumerate().skip(a) {
                let target = if a == b { ONE } else { ZERO };
                defect = defect.max((inner(u, v) - target).norm());
            }
        }
        if defect > TOL_RECONSTRUCT {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self { vectors })
    }

    /// Orthonormal set that must also span `C^dim`.
    pub fn complete(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let basis = Self::new(vectors)?;
        let dim = basis.dim();
        if basis.len() != dim || dim == 0 {
            return Err(Error::IncompleteBasis {
                len: basis.len(),
                dim,
            });
        }
        Ok(basis)
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            vectors: (0..dim).map(|i| basis_vector(dim, i)).collect(),
        }
    }

    /// Columns of a unitary matrix as a basis.
    pub fn from_unitary_columns(u: &DenseOperator) -> Result<Self> {
        let n = u.dim();
        Self::complete(
            (0..n)
                .map(|c| (0..n).map(|r| u.get(r, c)).collect())
                .collect(),
        )
    }

    /// Dimension of the ambient space.
    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn iter(&self) -> impl Iterator<Item = &[C64]> {
        self.vectors.iter().map(Vec::as_slice)
    }
}

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: DenseOperator,
    spectrum: Spectrum,
}

impl DensityMatrix {
    pub fn new(op: DenseOperator) -> Result<Self> {
        Self::with_tolerance(op, TOL_STATE)
    }

    /// Validates with a custom trace/positivity tolerance; Hermiticity
    /// always uses [`TOL_HERMITIAN`].
    pub fn with_tolerance(op: DenseOperator, tol: f64) -> Result<Self> {
        op.ensure_hermitian()?;
        let trace = op.trace().re;
        if (trace - 1.0).abs() > tol {
            return Err(Error::InvalidTrace { trace });
        }
        let spectrum = eig_hermitian(&op)?;
        let min_eigenvalue = spectrum.values.first().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { op, spectrum })
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        Self::new(DenseOperator::outer(psi, psi))
    }

    /// Diagonal state `sum_i p_i |i><i|`.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(DenseOperator::diagonal(populations))
    }

    pub fn op(&self) -> &DenseOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn eigen(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Conjugates the state by a unitary, `U rho U^dag`.
    pub fn rotated(&self, u: &DenseOperator) -> Result<Self> {
        self.op.ensure_dim(u.dim())?;
        let out = &(u * &self.op) * &u.adjoint();
        Self::with_tolerance(out.hermitian_part(), TOL_RECONSTRUCT)
    }
}

/// One eigenvalue of an observable together with the projector onto its eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub value: f64,
    pub projector: DenseOperator,
}

/// A Hermitian operator with its spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    op: DenseOperator,
    spectrum: Spectrum,
    levels: Vec<Level>,
}

impl Observable {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let spectrum = eig_hermitian(&op)?;
        let mut levels: Vec<Level> = Vec::new();
        let mut members: Vec<usize> = Vec::new();
        let flush = |members: &mut Vec<usize>, levels: &mut Vec<Level>| {
            if members.is_empty() {
                return;
            }
            let weight = members.len() as f64;
            let value = members.iter().map(|&k| spectrum.values[k]).sum::<f64>() / weight;
            let mut projector = DenseOperator::zeros(op.dim());
            for &k in members.iter() {
                let v = &spectrum.vectors[k];
                projector = &projector + &DenseOperator::outer(v, v);
            }
            levels.push(Level { value, projector });
            members.clear();
        };
        for k in 0..spectrum.len() {
            if let Some(&first) = members.first() {
                if spectrum.values[k] - spectrum.values[first] > TOL_LEVEL {
                    flush(&mut members, &mut levels);
                }
            }
            members.push(k);
        }
        flush(&mut members, &mut levels);
        Ok(Self {
            op,
            spectrum,
            levels,
        })
    }

    /// The zero observable on `C^dim`.
    pub fn zero(dim: usize) -> Self {
        Self::new(DenseOperator::zeros(dim)).expect("zero operator is Hermitian")
    }

    pub fn op(&self) -> &DenseOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Distinct eigenvalues (merged within [`TOL_LEVEL`]) with eigenspace projectors.
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }
}

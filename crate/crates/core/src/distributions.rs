//! Two-point-measurement and quantum-Bayesian-network statistics of the
//! change `ΔG = g_tau - g_0`, jointly with the ancilla outcome.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{Basis, DensityMatrix, Observable, C64};
use crate::unravelling::{channel_operator, clamp_probability, KrausSet};

/// `ΔG` values within this distance share one atom.
pub const TOL_BIN: f64 = 1e-9;
/// Default gate on `max |[G_0, rho]|` for the incoherent (TPM) path.
pub const TOL_COMMUTE: f64 = 1e-9;
/// Off-diagonal tolerance when checking that a basis diagonalizes a state.
pub const TOL_DIAGONAL: f64 = 1e-9;
/// Populated eigenvalues of `rho` closer than this are considered degenerate.
pub const TOL_DEGENERATE: f64 = 1e-9;
/// Eigenvalues of `rho` at or below this carry no weight.
pub const TOL_POPULATED: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpmOptions {
    pub commutator_tol: f64,
}

impl Default for TpmOptions {
    fn default() -> Self {
        Self {
            commutator_tol: TOL_COMMUTE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of a finite distribution given as `(value, probability)` pairs.
///
/// Variance roundoff down to `-1e-12` is clamped to zero.
pub fn moments<I>(atoms: I) -> Moments
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (mut m1, mut m2) = (0.0, 0.0);
    for (x, p) in atoms {
        m1 += x * p;
        m2 += x * x * p;
    }
    let variance = m2 - m1 * m1;
    debug_assert!(variance >= -1e-12, "negative variance {variance}");
    Moments {
        mean: m1,
        variance: variance.max(0.0),
    }
}

/// Marginal distribution of `ΔG`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    atoms: Vec<(f64, f64)>,
}

impl Distribution {
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self {
            atoms: bin(atoms.into_iter().collect()),
        }
    }

    /// `(ΔG, probability)` pairs in ascending `ΔG`.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Probability of the atom at `delta` (within [`TOL_BIN`]), zero if absent.
    pub fn prob_at(&self, delta: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.0 - delta).abs() <= TOL_BIN)
            .map(|a| a.1)
            .sum()
    }

    pub fn moments(&self) -> Moments {
        moments(self.atoms.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub delta: f64,
    pub label: String,
    pub prob: f64,
}

/// Finite joint distribution over `(ΔG, gamma)`.
///
/// Atoms are grouped by outcome in label order and sorted by `ΔG` within
/// each outcome; coinciding `ΔG` values are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    labels: Vec<String>,
    atoms: Vec<Atom>,
}

impl JointDistribution {
    /// Bins the given atoms. `labels` fixes the outcome order; atoms with
    /// unknown labels are appended in first-seen order.
    pub fn new(labels: Vec<String>, atoms: Vec<Atom>) -> Self {
        let mut labels = labels;
        let mut grouped: Vec<Vec<(f64, f64)>> = vec![Vec::new(); labels.len()];
        for atom in atoms {
            let slot = match labels.iter().position(|l| *l == atom.label) {
                Some(i) => i,
                None => {
                    labels.push(atom.label);
                    grouped.push(Vec::new());
                    labels.len() - 1
                }
            };
            grouped[slot].push((atom.delta, atom.prob));
        }
        let atoms = labels
            .iter()
            .zip(grouped)
            .flat_map(|(label, group)| {
                bin(group).into_iter().map(move |(delta, prob)| Atom {
                    delta,
                    label: label.clone(),
                    prob,
                })
            })
            .collect();
        Self { labels, atoms }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob).sum()
    }

    /// `P(gamma)` in label order.
    pub fn label_marginal(&self) -> Vec<(String, f64)> {
        self.labels
            .iter()
            .map(|l| {
                let p = self
                    .atoms
                    .iter()
                    .filter(|a| a.label == *l)
                    .map(|a| a.prob)
                    .sum();
                (l.clone(), p)
            })
            .collect()
    }

    /// `P(ΔG)`
    pub fn delta_marginal(&self) -> Distribution {
        Distribution::new(self.atoms.iter().map(|a| (a.delta, a.prob)))
    }

    /// Moments of `ΔG` under the joint.
    pub fn moments(&self) -> Moments {
        moments(self.atoms.iter().map(|a| (a.delta, a.prob)))
    }

    /// Keeps only the selected comma-separated components of each label and
    /// sums out the rest. An empty selection yields the single label `""`.
    pub fn coarsen(&self, observed: &[usize]) -> Result<Self> {
        let mut labels = Vec::new();
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            let coarse = select_components(&atom.label, observed)?;
            if !labels.contains(&coarse) {
                labels.push(coarse.clone());
            }
            atoms.push(Atom {
                delta: atom.delta,
                label: coarse,
                prob: atom.prob,
            });
        }
        Ok(Self::new(labels, atoms))
    }

    /// Shifts every atom by an outcome-dependent amount, e.g. `W = Q(gamma) + ΔG`.
    pub fn shifted(&self, shift: &BTreeMap<String, f64>) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let q = shift
                    .get(&a.label)
                    .ok_or_else(|| Error::MissingHeat(a.label.clone()))?;
                Ok(Atom {
                    delta: a.delta + q,
                    label: a.label.clone(),
                    prob: a.prob,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(self.labels.clone(), atoms))
    }
}

/// Picks components of a comma-separated label.
pub(crate) fn select_components(label: &str, observed: &[usize]) -> Result<String> {
    let parts: Vec<&str> = label.split(',').collect();
    let picked = observed
        .iter()
        .map(|&i| {
            parts.get(i).copied().ok_or(Error::SelectorOutOfRange {
                index: i,
                components: parts.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(picked.join(","))
}

/// Sorts by value and merges values within [`TOL_BIN`] of a cluster's first
/// member. The merged value is the probability-weighted mean, so the first
/// moment is unchanged.
fn bin(mut atoms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    let mut cluster: Vec<(f64, f64)> = Vec::new();
    let flush = |cluster: &mut Vec<(f64, f64)>, out: &mut Vec<(f64, f64)>| {
        if cluster.is_empty() {
            return;
        }
        let prob: f64 = cluster.iter().map(|a| a.1).sum();
        let value = if cluster.len() == 1 || prob <= 0.0 {
            cluster[0].0
        } else {
            cluster.iter().map(|a| a.0 * a.1).sum::<f64>() / prob
        };
        out.push((value, prob));
        cluster.clear();
    };
    for atom in atoms {
        if let Some(first) = cluster.first() {
            if atom.0 - first.0 > TOL_BIN {
                flush(&mut cluster, &mut out);
            }
        }
        cluster.push(atom);
    }
    flush(&mut cluster, &mut out);
    out
}

fn check_dims(k: &KrausSet, rho: &DensityMatrix, g0: &Observable, gt: &Observable) -> Result<()> {
    let dim = k.dim();
    for actual in [rho.dim(), g0.dim(), gt.dim()] {
        if actual != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual,
            });
        }
    }
    Ok(())
}

/// `max |[G_0, rho]|` entrywise.
pub fn commutator_defect(g0: &Observable, rho: &DensityMatrix) -> f64 {
    g0.op().commutator(rho.op()).max_abs()
}

fn ensure_commuting(g0: &Observable, rho: &DensityMatrix, opts: &TpmOptions) -> Result<()> {
    let defect = commutator_defect(g0, rho);
    if defect >= opts.commutator_tol {
        return Err(Error::NonCommuting { defect });
    }
    Ok(())
}

/// `<ΔG> = tr(G_tau Λ[rho]) - tr(G_0 rho)`.
pub fn average_change(
    k: &KrausSet,
    rho: &DensityMatrix,
    g0: &Observable,
    gt: &Observable,
) -> Result<f64> {
    check_dims(k, rho, g0, gt)?;
    let evolved = channel_operator(k, rho.op());
    Ok(gt.op().trace_product(&evolved).re - g0.op().trace_product(rho.op()).re)
}

/// TPM distribution of `ΔG`: measure `G_0`, apply the channel, measure `G_tau`.
pub fn tpm_distribution(
    k: &KrausSet,
    rho: &DensityMatrix,
    g0: &Observable,
    gt: &Observable,
) -> Result<Distribution> {
    tpm_distribution_with(k, rho, g0, gt, &TpmOptions::default())
}

pub fn tpm_distribution_with(
    k: &KrausSet,
    rho: &DensityMatrix,
    g0: &Observable,
    gt: &Observable,
    opts: &TpmOptions,
) -> Result<Distribution> {
    check_dims(k, rho, g0, gt)?;
    ensure_commuting(g0, rho, opts)?;
    let mut atoms = Vec::new();
    for initial in g0.levels() {
        let post = &(&initial.projector * rho.op()) * &initial.projector;
        let evolved = channel_operator(k, &post);
        for last in gt.levels() {
            let p = last.projector.trace_product(&evolved).re;
            atoms.push((last.value - initial.value, clamp_probability("", p)?));
        }
    }
    Ok(Distribution::new(atoms))
}

/// Joint TPM distribution of `(ΔG, gamma)` for a state commuting with `G_0`.
pub fn joint_tpm(
    k: &KrausSet,
    rho: &DensityMatrix,
    g0: &Observable,
    gt: &Observable,
) -> Result<JointDistribution> {
    joint_tpm_with(k, rho, g0, gt, &TpmOptions::default())
}

pub fn joint_tpm_with(
    k: &KrausSet,
    rho: &DensityMatrix,
    g0: &Observable,
    gt: &Observable,
    opts: &TpmOptions,
) -> Result<JointDistribution> {
    check_dims(k, rho, g0, gt)?;
    ensure_commuting(g0, rho, opts)?;
    let mut atoms = Vec::new();
    for element in k.elements() {
        let m_dag = element.op.adjoint();
        for initial in g0.levels() {
            let post = &(&initial.projector * rho.op()) * &initial.projector;
            let evolved = &(&element.op * &post) * &m_dag;
            for last in gt.levels() {
                let p = last.projector.trace_product(&evolved).re;
                atoms.push(Atom {
                    delta: last.value - initial.value,
                    label: element.label.clone(),
                    prob: clamp_probability(&element.label, p)?,
                });
            }
        }
    }
    Ok(JointDistribution::new(
        k.labels().map(str::to_owned).collect(),
        atoms,
    ))
}

/// Eigen-ensemble `{(p_alpha, |psi_alpha>)}` of `rho`, either in the supplied
/// basis or from its own eigendecomposition.
pub fn state_ensemble(
    rho: &DensityMatrix,
    rho_basis: Option<&Basis>,
) -> Result<Vec<(f64, Vec<C64>)>> {
    let dim = rho.dim();
    match rho_basis {
        Some(basis) => {
            if basis.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: basis.dim(),
                });
            }
            if basis.len() != dim {
                return Err(Error::IncompleteBasis {
                    len: basis.len(),
                    dim,
                });
            }
            let mut defect = 0.0_f64;
            let mut ensemble = Vec::with_capacity(dim);
            for (a, u) in basis.iter().enumerate() {
                for (b, v) in basis.iter().enumerate() {
                    if a != b {
                        defect = defect.max(rho.op().sandwich(u, v).norm());
                    }
                }
                let p = rho.op().sandwich(u, u).re;
                ensemble.push((p.max(0.0), u.to_vec()));
            }
            if defect > TOL_DIAGONAL {
                return Err(Error::BasisDoesNotDiagonalize { defect });
            }
            Ok(ensemble)
        }
        None => {
            let spectrum = rho.eigen();
            for pair in spectrum.values.windows(2) {
                if pair[0] > TOL_POPULATED && pair[1] - pair[0] < TOL_DEGENERATE {
                    return Err(Error::DegenerateState {
                        eigenvalue: pair[1],
                    });
                }
            }
            Ok(spectrum
                .values
                .iter()
                .zip(&spectrum.vectors)
                .map(|(&p, v)| (p.max(0.0), v.clone()))
                .collect())
        }
    }
}

/// QBN joint distribution of `(ΔG, gamma)`, valid for states with coherence
/// in the `G_0` eigenbasis. Each eigenstate `|psi_alpha>` of `rho` is
/// assigned `G_0` values with weights `|<g_0|psi_alpha>|^2` and evolved by
/// `M_gamma` before the final `G_tau` measurement.
pub fn qbn_joint(
    k: &KrausSet,
    rho: &DensityMatrix,
    rho_basis: Option<&Basis>,
    g0: &Observable,
    gt: &Observable,
) -> Result<JointDistribution> {
    check_dims(k, rho, g0, gt)?;
    let ensemble = state_ensemble(rho, rho_basis)?;
    let mut atoms = Vec::new();
    for element in k.elements() {
        for (p_alpha, psi) in &ensemble {
            let evolved = element.op.apply(psi);
            let finals: Vec<(f64, f64)> = gt
                .levels()
                .iter()
                .map(|l| {
                    (
                        l.value,
                        l.projector.sandwich(&evolved, &evolved).re.max(0.0),
                    )
                })
                .collect();
            for initial in g0.levels() {
                let p_g0 = initial.projector.sandwich(psi, psi).re.max(0.0);
                for &(g_tau, p_final) in &finals {
                    atoms.push(Atom {
                        delta: g_tau - initial.value,
                        label: element.label.clone(),
                        prob: p_final * p_g0 * p_alpha,
                    });
                }
            }
        }
    }
    Ok(JointDistribution::new(
        k.labels().map(str::to_owned).collect(),
        atoms,
    ))
}

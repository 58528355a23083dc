//! Randomized checks of the predictor identities: average reproduction,
//! the MSE–variance relation, optimality against perturbed predictors, and
//! agreement between the closed forms and brute-force conditional means.

use std::collections::BTreeMap;

use mspredict_core::distributions::{average_change, joint_tpm, qbn_joint, JointDistribution};
use mspredict_core::linalg::{DenseOperator, DensityMatrix, Observable};
use mspredict_core::predictors::{
    conditional_mean_oracle, marginal_predictor, mse, optimal_predictor,
    optimal_predictor_coherent, PredictorTable,
};
use mspredict_core::unravelling::{compose, outcome_probabilities, KrausSet};
use mspredict_core::{random, ProcessModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODELS: usize = 200;

fn predictor_and_joint(m: &ProcessModel, coherent: bool) -> (PredictorTable, JointDistribution) {
    if coherent {
        let basis = m.rho_basis.as_ref();
        (
            optimal_predictor_coherent(&m.kraus, &m.rho, basis, &m.g0, &m.gt).unwrap(),
            qbn_joint(&m.kraus, &m.rho, basis, &m.g0, &m.gt).unwrap(),
        )
    } else {
        (
            optimal_predictor(&m.kraus, &m.rho, &m.g0, &m.gt).unwrap(),
            joint_tpm(&m.kraus, &m.rho, &m.g0, &m.gt).unwrap(),
        )
    }
}

fn ensemble(seed: u64) -> Vec<(ProcessModel, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..MODELS)
        .map(|i| {
            let coherent = i % 2 == 1;
            (random::model(&mut rng, coherent), coherent)
        })
        .collect()
}

#[test]
fn average_is_reproduced() {
    for (m, coherent) in ensemble(1) {
        let (table, _) = predictor_and_joint(&m, coherent);
        let avg = average_change(&m.kraus, &m.rho, &m.g0, &m.gt).unwrap();
        assert!(
            (table.moments().mean - avg).abs() < 1e-9,
            "mean {} vs {avg}",
            table.moments().mean
        );
    }
}

#[test]
fn mse_equals_variance_gap() {
    for (m, coherent) in ensemble(2) {
        let (table, joint) = predictor_and_joint(&m, coherent);
        let error = mse(&table, &joint).unwrap();
        let gap = joint.moments().variance - table.moments().variance;
        assert!((error - gap).abs() < 1e-9, "mse {error} vs gap {gap}");
        assert!(error >= -1e-12);
    }
}

#[test]
fn perturbed_predictors_never_win() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (m, coherent) in ensemble(3) {
        let (table, joint) = predictor_and_joint(&m, coherent);
        let best = mse(&table, &joint).unwrap();
        for trial in 0..100 {
            let scale = 10f64.powi(-(trial % 8));
            let other: BTreeMap<String, f64> = table
                .rows()
                .iter()
                .map(|r| {
                    let v = r.value.unwrap_or(0.0);
                    (r.label.clone(), v + scale * rng.random_range(-1.0..1.0))
                })
                .collect();
            assert!(mse(&other, &joint).unwrap() >= best - 1e-12);
        }
    }
}

#[test]
fn closed_form_matches_conditional_mean() {
    for (m, coherent) in ensemble(4) {
        let (table, joint) = predictor_and_joint(&m, coherent);
        let oracle = conditional_mean_oracle(&joint);
        for (a, b) in table.rows().iter().zip(oracle.rows()) {
            assert_eq!(a.label, b.label);
            assert!((a.prob - b.prob).abs() < 1e-10);
            match (a.value, b.value) {
                (Some(x), Some(y)) => assert!((x - y).abs() < 1e-10, "{x} vs {y}"),
                (None, None) => {}
                other => panic!("definedness differs: {other:?}"),
            }
        }
    }
}

#[test]
fn qbn_properties() {
    for (m, coherent) in ensemble(5) {
        let basis = m.rho_basis.as_ref();
        let qbn = qbn_joint(&m.kraus, &m.rho, basis, &m.g0, &m.gt).unwrap();
        assert!(qbn.atoms().iter().all(|a| a.prob >= 0.0));
        assert!((qbn.total() - 1.0).abs() < 1e-9);
        let avg = average_change(&m.kraus, &m.rho, &m.g0, &m.gt).unwrap();
        assert!((qbn.moments().mean - avg).abs() < 1e-9);
        if !coherent {
            let tpm = joint_tpm(&m.kraus, &m.rho, &m.g0, &m.gt).unwrap();
            assert_eq!(tpm.atoms().len(), qbn.atoms().len());
            for (a, b) in tpm.atoms().iter().zip(qbn.atoms()) {
                assert_eq!(a.label, b.label);
                assert!((a.delta - b.delta).abs() < 1e-9);
                assert!((a.prob - b.prob).abs() < 1e-10);
            }
            // coherent predictor collapses onto the incoherent one
            let inc = optimal_predictor(&m.kraus, &m.rho, &m.g0, &m.gt).unwrap();
            let coh = optimal_predictor_coherent(&m.kraus, &m.rho, basis, &m.g0, &m.gt).unwrap();
            for (a, b) in inc.rows().iter().zip(coh.rows()) {
                if let (Some(x), Some(y)) = (a.value, b.value) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn probabilities_sum_to_one() {
    for (m, _) in ensemble(6) {
        let p = outcome_probabilities(&m.kraus, &m.rho).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let evolved = mspredict_core::apply_channel(&m.kraus, &m.rho).unwrap();
        assert!((evolved.op().trace().re - 1.0).abs() < 1e-9);
        assert!(evolved.eigen().values[0] >= -1e-9);
    }
}

/// Diagonal Kraus operators never move the state between `G_0` levels, so
/// with `G_tau = G_0 + c` the change is exactly `c` on every run.
#[test]
fn dispersionless_change_is_predicted_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let dim = rng.random_range(2..=4);
        let outcomes = rng.random_range(2..=4);
        let v = random::unitary(&mut rng, dim);
        let levels: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let shift = rng.random_range(-1.0..1.0);
        let rotate = |d: &DenseOperator| &(&v * d) * &v.adjoint();
        let g0 =
            Observable::new(rotate(&DenseOperator::diagonal(&levels)).hermitian_part()).unwrap();
        let shifted: Vec<f64> = levels.iter().map(|x| x + shift).collect();
        let gt =
            Observable::new(rotate(&DenseOperator::diagonal(&shifted)).hermitian_part()).unwrap();

        // per-level weights |m_gamma,i|^2 summing to one
        let weights: Vec<Vec<f64>> = (0..dim)
            .map(|_| random::populations(&mut rng, outcomes))
            .collect();
        let ops: Vec<DenseOperator> = (0..outcomes)
            .map(|g| {
                let amp: Vec<f64> = weights.iter().map(|w| w[g].sqrt()).collect();
                rotate(&DenseOperator::diagonal(&amp))
            })
            .collect();
        let k = KrausSet::indexed(ops).unwrap();
        let basis = mspredict_core::Basis::from_unitary_columns(&v).unwrap();
        let rho = random::state_in_basis(&mut rng, &basis);

        let joint = joint_tpm(&k, &rho, &g0, &gt).unwrap();
        assert!(joint.moments().variance < 1e-12);
        let table = optimal_predictor(&k, &rho, &g0, &gt).unwrap();
        assert!(mse(&table, &joint).unwrap() < 1e-12);
        assert!(table.moments().variance < 1e-12);
    }
}

#[test]
fn composed_sets_stay_complete() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let dim = rng.random_range(2..=3);
        let stages: Vec<KrausSet> = (0..3)
            .map(|_| {
                let outcomes = rng.random_range(2..=3);
                random::kraus_set(&mut rng, dim, outcomes)
            })
            .collect();
        let composite = compose(&stages).unwrap();
        assert_eq!(
            composite.len(),
            stages.iter().map(KrausSet::len).product::<usize>()
        );
        assert!(composite.completeness_defect() < 1e-8);
    }
}

/// Two measurement rounds where only one round is read out: averaging the
/// full-record predictor matches the conditional mean of the coarsened joint.
#[test]
fn partial_record_prediction_matches_coarsened_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let first = random::kraus_set(&mut rng, 2, 2);
        let second = random::kraus_set(&mut rng, 2, 2);
        let k = compose(&[first, second]).unwrap();
        let g0 = random::observable(&mut rng, 2, false);
        let gt = random::observable(&mut rng, 2, false);
        let basis = mspredict_core::Basis::complete(g0.spectrum().vectors.clone()).unwrap();
        let rho: DensityMatrix = random::state_in_basis(&mut rng, &basis);

        let table = optimal_predictor(&k, &rho, &g0, &gt).unwrap();
        let joint = joint_tpm(&k, &rho, &g0, &gt).unwrap();
        assert_eq!(joint.labels(), ["0,0", "1,0", "0,1", "1,1"]);
        for observed in [vec![0], vec![1], vec![0, 1], vec![]] {
            let fast = marginal_predictor(&table, &joint, &observed).unwrap();
            let slow = conditional_mean_oracle(&joint.coarsen(&observed).unwrap());
            assert_eq!(fast.rows().len(), slow.rows().len());
            for (a, b) in fast.rows().iter().zip(slow.rows()) {
                assert_eq!(a.label, b.label);
                assert!((a.value.unwrap() - b.value.unwrap()).abs() < 1e-12);
            }
        }
    }
}

/// With `G_tau = 0` the predictor estimates `-G_0` from the outcome.
#[test]
fn retrodiction_is_the_conditional_initial_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..40 {
        let m = random::model(&mut rng, false);
        let zero = Observable::zero(m.g0.dim());
        let table = optimal_predictor(&m.kraus, &m.rho, &m.g0, &zero).unwrap();
        let joint = joint_tpm(&m.kraus, &m.rho, &m.g0, &zero).unwrap();
        // brute force: E[g_0 | γ] from P(a, γ) = tr(E_γ Π_a ρ Π_a)
        for row in table.rows() {
            let k = m.kraus.get(&row.label).unwrap();
            let e = &k.adjoint() * k;
            let (mut p, mut first) = (0.0, 0.0);
            for level in m.g0.levels() {
                let pa = &(&level.projector * m.rho.op()) * &level.projector;
                let w = e.trace_product(&pa).re;
                p += w;
                first += w * level.value;
            }
            assert!((p - row.prob).abs() < 1e-12);
            if let Some(v) = row.value {
                assert!((v + first / p).abs() < 1e-10);
            }
        }
        assert!(mse(&table, &joint).unwrap() >= -1e-12);
    }
}

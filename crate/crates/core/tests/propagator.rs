//! Convergence and structural checks for the midpoint propagator.

use mspredict_core::dynamics::propagate_interval;
use mspredict_core::linalg::pauli;
use mspredict_core::random;
use mspredict_core::{
    expm_i_hermitian, propagate, DenseOperator, DrivenQubitParams, PropagatorConfig,
    TimeDependentHamiltonian,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn driven_joint() -> TimeDependentHamiltonian {
    DrivenQubitParams::reference(5.0).joint_hamiltonian()
}

#[test]
fn step_halving_ratio_is_second_order() {
    let h = driven_joint();
    let u = |n| propagate(&h, PropagatorConfig::new(5.0).with_steps(n)).unwrap();
    let (u1, u2, u4) = (u(200), u(400), u(800));
    let ratio = u1.max_abs_diff(&u2) / u2.max_abs_diff(&u4);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn constant_hamiltonian_matches_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dim in 1..=5 {
        let hm = random::hermitian(&mut rng, dim);
        let exact = expm_i_hermitian(&hm, 1.7).unwrap();
        let h = TimeDependentHamiltonian::constant(hm);
        for steps in [1, 7, 50] {
            let u = propagate(&h, PropagatorConfig::new(1.7).with_steps(steps)).unwrap();
            assert!(u.max_abs_diff(&exact) < 1e-9);
        }
    }
}

#[test]
fn result_is_unitary() {
    let h = driven_joint();
    for tau in [0.0, 0.3, 5.0, 30.0] {
        let u = propagate(&h, PropagatorConfig::new(tau).with_steps(500)).unwrap();
        assert!(u.unitarity_defect() < 1e-9);
    }
    let flip = TimeDependentHamiltonian::new(2, |t| {
        &pauli::z().scale_real(t.cos()) + &pauli::y().scale_real(3.0 * t)
    });
    let u = propagate(&flip, PropagatorConfig::new(4.0).with_steps(333)).unwrap();
    assert!(u.unitarity_defect() < 1e-9);
}

#[test]
fn halves_compose_to_whole() {
    let h = driven_joint();
    let whole = propagate_interval(&h, 0.0, 6.0, 600).unwrap();
    let first = propagate_interval(&h, 0.0, 3.0, 300).unwrap();
    let second = propagate_interval(&h, 3.0, 6.0, 300).unwrap();
    assert!((&second * &first).max_abs_diff(&whole) < 1e-8);
}

#[test]
fn zero_time_is_identity() {
    let h = driven_joint();
    let u = propagate(&h, PropagatorConfig::new(0.0)).unwrap();
    assert_eq!(u, DenseOperator::identity(4));
}

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mspredict_core::random;
use mspredict_core::{
    optimal_predictor, optimal_predictor_coherent, propagate, qbn_joint, DrivenQubitParams,
    PropagatorConfig,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn predictors(c: &mut Criterion) {
    let mut group = c.benchmark_group("predictor");
    for (name, coherent) in [("incoherent", false), ("coherent", true)] {
        let mut rng = StdRng::seed_from_u64(7);
        let models: Vec<_> = (0..32).map(|_| random::model(&mut rng, coherent)).collect();
        group.bench_function(BenchmarkId::new(name, models.len()), |b| {
            b.iter(|| {
                for m in &models {
                    let t = if coherent {
                        optimal_predictor_coherent(
                            &m.kraus,
                            &m.rho,
                            m.rho_basis.as_ref(),
                            &m.g0,
                            &m.gt,
                        )
                    } else {
                        optimal_predictor(&m.kraus, &m.rho, &m.g0, &m.gt)
                    };
                    black_box(t.unwrap());
                }
            })
        });
    }
    group.finish();

    let mut rng = StdRng::seed_from_u64(8);
    let models: Vec<_> = (0..32).map(|_| random::model(&mut rng, true)).collect();
    c.bench_function("qbn_joint/32", |b| {
        b.iter(|| {
            for m in &models {
                black_box(qbn_joint(&m.kraus, &m.rho, m.rho_basis.as_ref(), &m.g0, &m.gt).unwrap());
            }
        })
    });
}

fn propagation(c: &mut Criterion) {
    let h = DrivenQubitParams::reference(5.0).joint_hamiltonian();
    let mut group = c.benchmark_group("propagate");
    for steps in [250, 2000] {
        group.bench_with_input(BenchmarkId::from_parameter(steps), &steps, |b, &steps| {
            b.iter(|| propagate(&h, PropagatorConfig::new(5.0).with_steps(steps)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, predictors, propagation);
criterion_main!(benches);

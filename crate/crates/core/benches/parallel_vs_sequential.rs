use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use autocall::analytic::{sweep, CouponLadder, SweepSpec};
use autocall::montecarlo::{
    enumerate_exact, estimate_both, DailyLattice, GeometricWalk, IidSign, MarketModel, McConfig,
};
use autocall::{Execution, NoteTerms};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn monte_carlo(c: &mut Criterion) {
    let terms = NoteTerms::reference();
    let models = [
        (
            "iid_sign",
            MarketModel::IidSign(IidSign::new(0.29, 0.1, 0.1).unwrap()),
            200_000,
        ),
        (
            "geometric_walk",
            MarketModel::GeometricWalk(GeometricWalk::new(-0.0005, 0.02, 381).unwrap()),
            20_000,
        ),
    ];
    let mut group = c.benchmark_group("estimate");
    group.sample_size(10);
    for (name, model, paths) in &models {
        for (mode, execution) in MODES {
            let cfg = McConfig::new(*paths, 1).with_execution(execution);
            group.bench_with_input(BenchmarkId::new(*name, mode), &cfg, |b, cfg| {
                b.iter(|| estimate_both(black_box(model), &terms, cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let terms = NoteTerms::reference();
    let lattice = DailyLattice::new(1.05, 0.93, 0.45, 3).unwrap();
    let mut group = c.benchmark_group("enumerate_exact_18_steps");
    group.sample_size(10);
    for (mode, execution) in MODES {
        group.bench_function(mode, |b| {
            b.iter(|| enumerate_exact(black_box(&lattice), &terms, execution).unwrap())
        });
    }
    group.finish();
}

fn surface(c: &mut Criterion) {
    let ladder = CouponLadder::from_terms(&NoteTerms::reference());
    let mut group = c.benchmark_group("bound_surface_401");
    for (mode, execution) in MODES {
        group.bench_function(mode, |b| {
            b.iter(|| {
                sweep(
                    black_box(&ladder),
                    SweepSpec::Surface { points: 401 },
                    execution,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, enumeration, surface);
criterion_main!(benches);

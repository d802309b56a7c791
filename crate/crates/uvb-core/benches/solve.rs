use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use uvb_core::classify::classify;
use uvb_core::constraints::build_system;
use uvb_core::solver::{solve, SolverConfig};

const CASES: &[&str] = &["2;3,3;1,0", "3;3,1,3;2,1,0", "4;1,1,2,3;3,2,1,0"];

fn modes() -> [(&'static str, SolverConfig); 2] {
    [
        ("parallel", SolverConfig::default()),
        ("sequential", SolverConfig { parallel: false, ..SolverConfig::default() }),
    ]
}

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for case in CASES {
        let sys = build_system(&case.parse().unwrap(), 4).unwrap();
        for (name, cfg) in modes() {
            group.bench_with_input(BenchmarkId::new(name, case), &sys, |b, sys| b.iter(|| solve(sys, &cfg).unwrap()));
        }
    }
    group.finish();
}

fn bench_classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify_rank6");
    group.sample_size(10);
    for (name, cfg) in modes() {
        group.bench_function(name, |b| b.iter(|| classify(4, 6, &cfg)));
    }
    group.finish();
}

criterion_group!(benches, bench_solve, bench_classify);
criterion_main!(benches);

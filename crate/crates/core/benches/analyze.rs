//! Sequential against rayon-parallel analysis, for both exact solvers.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use symtruss::engine::{analyze_with, AnalysisOptions, Parallelism, SolveMethod};
use symtruss::fixtures;

fn analysis(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze");
    group.sample_size(20);
    for name in ["ex3", "ex4", "ex5"] {
        let m = fixtures::load(name).unwrap();
        for method in [SolveMethod::FractionFree, SolveMethod::Field] {
            for parallelism in [Parallelism::Sequential, Parallelism::Parallel] {
                let opts = AnalysisOptions { parallelism, method };
                let id = BenchmarkId::new(format!("{method:?}/{parallelism:?}"), name);
                group.bench_with_input(id, &opts, |b, opts| b.iter(|| analyze_with(&m, opts).unwrap()));
            }
        }
    }
    group.finish();
}

criterion_group!(benches, analysis);
criterion_main!(benches);

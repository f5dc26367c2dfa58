use catalysis_core::{
    pcoc_oracle, pcoc_state, quadrature_variances, tmd_click_distribution, wigner, CatalysisConfig,
    GridSpec, TmdConfig,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_states(c: &mut Criterion) {
    let mut group = c.benchmark_group("pcoc");
    for k in [1usize, 3, 6] {
        let cfg = CatalysisConfig::real(2.0, 0.45, k).unwrap();
        group.bench_with_input(BenchmarkId::new("closed_form", k), &cfg, |b, cfg| {
            b.iter(|| pcoc_state(black_box(cfg)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("oracle", k), &cfg, |b, cfg| {
            b.iter(|| pcoc_oracle(black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

fn bench_analysis(c: &mut Criterion) {
    let state = pcoc_state(&CatalysisConfig::real(2.7, 4.0 / 9.0, 6).unwrap())
        .unwrap()
        .state;
    c.bench_function("quadratures", |b| {
        b.iter(|| quadrature_variances(black_box(&state)).unwrap())
    });
    let grid = GridSpec::symmetric(5.0, 101);
    c.bench_function("wigner_101x101", |b| {
        b.iter(|| wigner(black_box(&state), &grid).unwrap())
    });
    let dist = state.number_distribution();
    let tmd = TmdConfig::new(64, 0.1).unwrap();
    c.bench_function("tmd_64_bins", |b| {
        b.iter(|| tmd_click_distribution(black_box(&dist), &tmd))
    });
}

criterion_group!(benches, bench_states, bench_analysis);
criterion_main!(benches);

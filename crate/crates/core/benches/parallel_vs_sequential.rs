use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use semichar::engine::{build_relations, l_torsion_rank, semichar_group, verify_semicharacter, EngineConfig};
use semichar::families::FamilySpec;
use semichar::{par, GroupTable, Semicharacter};
use std::hint::black_box;

fn groups() -> Vec<(&'static str, GroupTable)> {
    ["s5", "gl2:4", "u3:5"].into_iter().map(|n| (n, FamilySpec::parse(n).unwrap().build().unwrap().table)).collect()
}

/// One thread against the default pool. Without the `parallel` feature
/// both run sequentially.
fn thread_counts() -> [(&'static str, usize); 2] {
    [("sequential", 1), ("pool", 0)]
}

fn bench_relations(c: &mut Criterion) {
    let mut group = c.benchmark_group("relations");
    for (name, g) in groups() {
        for (mode, threads) in thread_counts() {
            group.bench_with_input(BenchmarkId::new(mode, name), &g, |b, g| {
                b.iter(|| par::with_threads(threads, || black_box(build_relations(g)).row_count()))
            });
        }
    }
    group.finish();
}

fn bench_semichar_group(c: &mut Criterion) {
    let cfg = EngineConfig::default();
    let mut group = c.benchmark_group("semichar_group");
    group.sample_size(10);
    for (name, g) in groups() {
        for (mode, threads) in thread_counts() {
            group.bench_with_input(BenchmarkId::new(mode, name), &g, |b, g| {
                b.iter(|| par::with_threads(threads, || semichar_group(g, &cfg).unwrap()))
            });
        }
    }
    group.finish();
}

fn bench_verify_and_torsion(c: &mut Criterion) {
    let cfg = EngineConfig::default();
    let mut group = c.benchmark_group("verify_and_torsion");
    group.sample_size(10);
    let (_, g) = groups().remove(1);
    let zero = Semicharacter::zero(g.order());
    for (mode, threads) in thread_counts() {
        group.bench_function(BenchmarkId::new("verify", mode), |b| {
            b.iter(|| par::with_threads(threads, || verify_semicharacter(&g, &zero).is_ok()))
        });
        group.bench_function(BenchmarkId::new("torsion_rank_2", mode), |b| {
            b.iter(|| par::with_threads(threads, || l_torsion_rank(&g, 2, &cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_relations, bench_semichar_group, bench_verify_and_torsion);
criterion_main!(benches);

//! Default rayon pool against a single-thread pool on the parallel hot paths.
//! Build with `--no-default-features` to time the plain iterator fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hpl_core::classifier::{classify_all, enumerate_valid_profiles};
use hpl_core::cobar::{CobarComplex, CobarConfig};
use hpl_core::{Prime, ProfileFunction};
use rayon::{ThreadPool, ThreadPoolBuilder};

fn pools() -> Vec<(&'static str, ThreadPool)> {
    vec![
        ("parallel", ThreadPoolBuilder::new().build().unwrap()),
        ("sequential", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
    ]
}

fn bench_enumerate(c: &mut Criterion) {
    let p = Prime::new(3).unwrap();
    let mut group = c.benchmark_group("enumerate_valid_profiles");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, "len5_entry4"), |b| {
            pool.install(|| b.iter(|| enumerate_valid_profiles(p, black_box(5), 4)))
        });
    }
    group.finish();
}

fn bench_classify(c: &mut Criterion) {
    let profiles = enumerate_valid_profiles(Prime::new(3).unwrap(), 4, 3);
    let mut group = c.benchmark_group("classify_all");
    group.sample_size(20);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, profiles.len()), |b| {
            pool.install(|| b.iter(|| classify_all(black_box(&profiles))))
        });
    }
    group.finish();
}

fn bench_differential(c: &mut Criterion) {
    let pf = ProfileFunction::from_parts(3, &[2, 1]).unwrap();
    let mut group = c.benchmark_group("differential_matrix");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, "(2,1) s=3 t=96"), |b| {
            pool.install(|| {
                b.iter(|| {
                    let cx = CobarComplex::new(&pf, CobarConfig::default()).unwrap();
                    cx.differential_matrix(black_box(3), 96).unwrap().rank()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_enumerate, bench_classify, bench_differential);
criterion_main!(benches);

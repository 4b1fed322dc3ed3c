use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pealab::algebra::{verify_iso, Op};
use pealab::eval::{check_all, CheckMode};
use pealab::suites::suite_p;
use pealab::witness::solve_eq0;
use pealab::{PolyadicModel, DEFAULT_BUDGET};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().expect("pool");
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool");
    vec![("pool", default), ("one_thread", single)]
}

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    for (name, pool) in pools() {
        for p in [3, 5] {
            group.bench_with_input(BenchmarkId::new(name, p), &p, |b, &p| {
                b.iter(|| pool.install(|| PolyadicModel::build(p, 3, DEFAULT_BUDGET).unwrap()))
            });
        }
    }
    group.finish();
}

fn axioms(c: &mut Criterion) {
    let model = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
    let eqs = suite_p(3).unwrap();
    let mode = CheckMode::Sampled {
        seed: 42,
        samples: 200,
    };
    let mut group = c.benchmark_group("suite_p_sampled");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| check_all(&model.ap, &eqs, mode, DEFAULT_BUDGET)))
        });
    }
    group.finish();
}

fn isomorphism(c: &mut Criterion) {
    let model = PolyadicModel::build(5, 3, DEFAULT_BUDGET).unwrap();
    let identity: Vec<usize> = (0..model.ap.atom_count()).collect();
    let mut group = c.benchmark_group("verify_iso");
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| verify_iso(&identity, &model.ap, &model.ap, &Op::ALL)))
        });
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let model = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
    let mut group = c.benchmark_group("solve_eq0");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| solve_eq0(&model.ap, 5, DEFAULT_BUDGET).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(kernels, build, axioms, isomorphism, search);
criterion_main!(kernels);

//! Median rule throughput on one worker versus the full thread pool.
//!
//! Built with `--no-default-features` every group runs the sequential path.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use median_lattice::experiment::estimate_expected_error;
use median_lattice::{
    integrate_median, make_integrand, par, FunctionKind, HChoice, MedianRuleConfig, TestFunctionSpec,
};

fn workers() -> Vec<(String, Option<usize>)> {
    let mut w = vec![("1 worker".to_string(), Some(1))];
    if par::is_parallel() {
        let all = std::thread::available_parallelism().map_or(1, |n| n.get());
        w.push((format!("{all} workers"), None));
    }
    w
}

fn median_rule(c: &mut Criterion) {
    let f = make_integrand(TestFunctionSpec::new(FunctionKind::F1 { c1: 4.0 }, 20).unwrap()).unwrap();
    let mut group = c.benchmark_group("integrate_median_f1_d20");
    group.sample_size(20);
    for n in [1_000u64, 10_000, 100_000] {
        let cfg = MedianRuleConfig::new(n, 20, HChoice::LogLog, 7).unwrap();
        for (label, w) in workers() {
            group.bench_with_input(BenchmarkId::new(label, n), &cfg, |b, cfg| {
                b.iter(|| par::with_workers(w, || integrate_median(black_box(&f), cfg).unwrap()))
            });
        }
    }
    group.finish();
}

fn expected_error(c: &mut Criterion) {
    let f = make_integrand(TestFunctionSpec::new(FunctionKind::Fac { a: 1.0, c: 3.0 }, 50).unwrap()).unwrap();
    let mut group = c.benchmark_group("expected_error_fac_d50_R10");
    group.sample_size(10);
    for (label, w) in workers() {
        group.bench_function(BenchmarkId::new(label, 2_000), |b| {
            b.iter(|| {
                par::with_workers(w, || {
                    estimate_expected_error(black_box(&f), 2_000, 10, false, &HChoice::LogLog, 3).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, median_rule, expected_error);
criterion_main!(benches);

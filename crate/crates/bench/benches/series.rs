use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use freewalk_bench::{pure_orthogonal, rotation_orthogonal, symmetric_pure, PURE_CASES};
use freewalk_core::bounds::{build_profile, char_lower, dsh_upper};
use freewalk_core::oracle::exact_tv;
use freewalk_core::verify::{run_check, GridSpec};
use freewalk_core::NumericContext;

fn upper_and_lower(c: &mut Criterion) {
    let ctx = NumericContext::default();
    let mut group = c.benchmark_group("bounds");
    for (size, t) in PURE_CASES {
        let s = pure_orthogonal(size, t);
        let id = format!("N{size}_t{t}");
        group.bench_with_input(BenchmarkId::new("dsh_upper", &id), &s, |b, s| {
            b.iter(|| dsh_upper(s, black_box(20), &ctx))
        });
        group.bench_with_input(BenchmarkId::new("char_lower", &id), &s, |b, s| {
            b.iter(|| char_lower(s, black_box(20), &ctx))
        });
    }
    group.finish();
}

fn exact_distance(c: &mut Criterion) {
    let ctx = NumericContext::default();
    let mut group = c.benchmark_group("exact_tv");
    group.sample_size(20);
    let cases = [
        ("oplus_N10_t6_k5", pure_orthogonal(10, 6.0), 5),
        ("oplus_N10_t6_k20", pure_orthogonal(10, 6.0), 20),
        ("oplus_N50_rot_pi_k30", rotation_orthogonal(50, PI), 30),
        ("splus_N9_t0_k2", symmetric_pure(9, 0.0), 2),
    ];
    for (id, s, k) in &cases {
        group.bench_function(*id, |b| b.iter(|| exact_tv(s, black_box(*k), &ctx).unwrap()));
    }
    group.finish();
}

fn profile(c: &mut Criterion) {
    let ctx = NumericContext::default();
    let s = rotation_orthogonal(10, PI);
    let mut group = c.benchmark_group("profile");
    group.sample_size(10);
    group.bench_function("oplus_N10_rot_pi_k1_30", |b| {
        b.iter(|| build_profile(&s, 1..=30, &ctx, true).unwrap())
    });
    group.finish();
}

fn verify_grid(c: &mut Criterion) {
    let ctx = NumericContext::default();
    let grid = GridSpec { points: 16, ..GridSpec::default() };
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for name in ["encadrement", "mixed-lemma"] {
        group.bench_function(name, |b| b.iter(|| run_check(name, &grid, &ctx).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, upper_and_lower, exact_distance, profile, verify_grid);
criterion_main!(benches);

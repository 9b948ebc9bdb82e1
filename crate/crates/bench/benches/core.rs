use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use masakit_bench::{ep1_catalog, lcg_matrix};
use masakit_core::charts::{chart_m21, chart_null_split};
use masakit_core::conformal::is_masa_upstairs;
use masakit_core::exactla::{nullspace, rref};
use masakit_core::liecore::{centralizer, is_masa};
use std::hint::black_box;

fn exact_linear_algebra(c: &mut Criterion) {
    let mut g = c.benchmark_group("exactla");
    for n in [8, 16, 28] {
        let m = lcg_matrix(n, n + 4, n as u64);
        g.bench_with_input(BenchmarkId::new("rref", n), &m, |b, m| b.iter(|| rref(black_box(m))));
        g.bench_with_input(BenchmarkId::new("nullspace", n), &m, |b, m| b.iter(|| nullspace(black_box(m))));
    }
    g.finish();
}

fn maximality(c: &mut Criterion) {
    let mut g = c.benchmark_group("maximality");
    g.sample_size(10);
    for p in [3, 5] {
        let algebras: Vec<_> = ep1_catalog(p).iter().map(|d| d.materialize().unwrap()).collect();
        g.bench_function(BenchmarkId::new("is_masa e(p,1) catalog", p), |b| {
            b.iter(|| algebras.iter().all(|s| is_masa(s, &s.ambient.full()).unwrap()))
        });
        g.bench_function(BenchmarkId::new("centralizer e(p,1) catalog", p), |b| {
            b.iter(|| algebras.iter().map(|s| centralizer(s, &s.ambient.full()).unwrap().dim()).sum::<usize>())
        });
        g.bench_function(BenchmarkId::new("is_masa_upstairs e(p,1) catalog", p), |b| {
            b.iter(|| algebras.iter().filter(|s| is_masa_upstairs(s).unwrap()).count())
        });
    }
    g.finish();
}

fn charts(c: &mut Criterion) {
    let mut g = c.benchmark_group("charts");
    let m21 = chart_m21();
    let u = m21.sample_points(1, 3).remove(0);
    g.bench_function("m21 operator", |b| b.iter(|| m21.lb_coefficients(black_box(&u)).unwrap()));
    for k in [2, 4] {
        let ch = chart_null_split(k).unwrap();
        let u = ch.sample_points(1, 3).remove(0);
        g.bench_function(BenchmarkId::new("null-split operator", k), |b| b.iter(|| ch.lb_coefficients(black_box(&u)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, exact_linear_algebra, maximality, charts);
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use eisrank_bench::{nilpotent_mix, random_matrix};
use eisrank_core::linalg::{generalized_kernel, rref_in_place, Fp};
use eisrank_core::modsym::{build_space, hecke_matrix, Sign};
use eisrank_core::zeta::ord_vs_theta_check;

fn zeta(c: &mut Criterion) {
    let mut g = c.benchmark_group("zeta");
    g.bench_function("ord_and_theta_4229_7", |b| {
        b.iter(|| ord_vs_theta_check(black_box(4229), black_box(7)).unwrap())
    });
    g.bench_function("ord_and_theta_3671_5", |b| {
        b.iter(|| ord_vs_theta_check(black_box(3671), black_box(5)).unwrap())
    });
    g.finish();
}

fn linalg(c: &mut Criterion) {
    let f = Fp::new(5);
    let mut g = c.benchmark_group("linalg");
    g.sample_size(10);
    let m = random_matrix(400, 5, 1);
    g.bench_function("rref_400", |b| {
        b.iter(|| {
            let mut a = m.clone();
            rref_in_place(&mut a, f, 400)
        })
    });
    let a = nilpotent_mix(300, 12, 5, 2);
    g.bench_function("generalized_kernel_300", |b| {
        b.iter(|| generalized_kernel(black_box(&a), f))
    });
    g.finish();
}

fn modsym(c: &mut Criterion) {
    let mut g = c.benchmark_group("modsym");
    g.sample_size(10);
    g.bench_function("build_plus_4229", |b| {
        b.iter(|| build_space(black_box(4229), 7, Sign::Plus).unwrap())
    });
    g.bench_function("build_plus_101_squared", |b| {
        b.iter(|| build_space(black_box(101 * 101), 5, Sign::Plus).unwrap())
    });
    let s = build_space(101 * 101, 5, Sign::Plus).unwrap();
    g.bench_function("hecke_7_at_101_squared", |b| {
        b.iter(|| hecke_matrix(&s, black_box(7)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, zeta, linalg, modsym);
criterion_main!(benches);

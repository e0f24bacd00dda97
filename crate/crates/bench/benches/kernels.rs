use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use schottky_core::fup::{restricted_norm, RadialCutoff};
use schottky_core::transfer::{find_zeros, zeta_det, Rect, ZeroSearchOptions};
use schottky_core::{elementary_schottky, symmetric_schottky};

fn determinant(c: &mut Criterion) {
    let d = symmetric_schottky(2, 0.8).unwrap();
    let s = Complex64::new(0.4, 5.0);
    c.bench_function("zeta_det r=2 M=24", |b| {
        b.iter(|| zeta_det(&d, black_box(s), 24).unwrap())
    });
}

fn zeros(c: &mut Criterion) {
    let e = elementary_schottky(2.0).unwrap();
    let rect = Rect::new(-0.5, 1.0, -4.0, 4.0).unwrap();
    let mut g = c.benchmark_group("find_zeros");
    g.sample_size(10);
    g.bench_function("elementary M=16", |b| {
        b.iter(|| find_zeros(&e, black_box(rect), 16, &ZeroSearchOptions::default()).unwrap())
    });
    g.finish();
}

fn fup_norm(c: &mut Criterion) {
    let d = symmetric_schottky(2, 0.8).unwrap();
    let chi = RadialCutoff::for_data(&d);
    let h = 2f64.powi(-8);
    let mut g = c.benchmark_group("restricted_norm");
    g.sample_size(10);
    g.bench_function("r=2 h=2^-8", |b| {
        b.iter(|| restricted_norm(&d, black_box(h), 0.8, 1.0, &chi, 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, determinant, zeros, fup_norm);
criterion_main!(benches);

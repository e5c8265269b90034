use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tunclock_core::barrier::solve_gaussian_width;
use tunclock_core::{presets, rect, transfer, BarrierProfile, DimensionlessPoint};

fn closed_form(c: &mut Criterion) {
    let p = DimensionlessPoint::new(1.4, 4.0).unwrap();
    c.bench_function("rect amplitude", |b| b.iter(|| rect::amplitude(black_box(p))));
    c.bench_function("rect coefficients", |b| b.iter(|| rect::expansion_coefficients(black_box(p))));
}

fn transfer_matrix(c: &mut Criterion) {
    let rb = presets::rb87();
    let v0 = presets::rb_gaussian_height();
    let g = BarrierProfile::gaussian(v0, solve_gaussian_width(4.0, v0, &rb).unwrap()).unwrap();
    let m = rb.mean_mass();
    let d = transfer::decompose(&g, 1024).unwrap();
    c.bench_function("transfer 1024 slabs", |b| {
        b.iter(|| transfer::amplitude(&d, black_box(1.4 * v0), m).unwrap())
    });
    c.bench_function("transfer adaptive", |b| {
        b.iter(|| transfer::adaptive_amplitude(&g, black_box(1.4 * v0), m, 1e-8).unwrap())
    });
    c.bench_function("gaussian delay", |b| {
        b.iter(|| transfer::gaussian_tunneling_time(&g, black_box(1.4), &rb, 1e-8).unwrap())
    });
}

criterion_group!(benches, closed_form, transfer_matrix);
criterion_main!(benches);

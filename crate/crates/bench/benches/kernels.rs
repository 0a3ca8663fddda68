use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hardy_tubes::config::Tolerances;
use hardy_tubes::polyalg::{roots_with_multiplicity, RootConfig};
use hardy_tubes::quadrature::lp_quasinorm;
use hardy_tubes::split::{select_phase, split_atom, PhaseVector, SplitParams};
use hardy_tubes_bench::{clustered_poly, recip_power_atom};

fn bench_quasinorm(c: &mut Criterion) {
    let tols = Tolerances::default();
    let smooth = recip_power_atom(3);
    c.bench_function("quasinorm_1d_smooth", |b| {
        b.iter(|| lp_quasinorm(black_box(&smooth), 0.5, &[0.0], 1e-7, &tols).unwrap())
    });

    // Real-axis pole: x (1 + x^2) in the denominator.
    let q = hardy_tubes::polyalg::UniPoly::new(vec![
        num_complex::Complex64::new(0.0, 0.0),
        num_complex::Complex64::new(1.0, 0.0),
        num_complex::Complex64::new(0.0, 0.0),
        num_complex::Complex64::new(1.0, 0.0),
    ]);
    let singular = hardy_tubes::SeparableRational::new(
        hardy_tubes::polyalg::MultiPoly::constant(1, num_complex::Complex64::new(1.0, 0.0)),
        vec![q],
    )
    .unwrap();
    c.bench_function("quasinorm_1d_real_pole", |b| {
        b.iter(|| lp_quasinorm(black_box(&singular), 0.5, &[0.0], 1e-6, &tols).unwrap())
    });
}

fn bench_split(c: &mut Criterion) {
    let tols = Tolerances::default();
    let atom = recip_power_atom(3);
    let params = SplitParams {
        m: vec![5],
        phase: PhaseVector::new(vec![1.0]).unwrap(),
    };
    c.bench_function("split_atom_1d", |b| {
        b.iter(|| split_atom(black_box(&atom), 0.5, &params, &tols).unwrap())
    });
    let scan_tols = Tolerances::fast();
    c.bench_function("select_phase_1d_grid16", |b| {
        b.iter(|| select_phase(black_box(&atom), 0.5, &[5], 16, 42, &scan_tols).unwrap())
    });
}

fn bench_roots(c: &mut Criterion) {
    let poly = clustered_poly(6);
    let cfg = RootConfig::default();
    c.bench_function("roots_clustered_deg8", |b| {
        b.iter(|| roots_with_multiplicity(black_box(&poly), &cfg).unwrap())
    });
}

criterion_group!(benches, bench_quasinorm, bench_split, bench_roots);
criterion_main!(benches);

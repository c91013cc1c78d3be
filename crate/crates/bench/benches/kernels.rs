use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mixlap_core::assembly::reference_entry;
use mixlap_core::fields::Radial;
use mixlap_core::{frac_apply, normalization_constant, OperatorParams, QuadratureSpec};

fn kernels(c: &mut Criterion) {
    let quad = QuadratureSpec::default();
    c.bench_function("normalization_constant N=2", |b| {
        b.iter(|| normalization_constant(black_box(2), black_box(0.5)))
    });
    for s in [0.25, 0.75] {
        let params = OperatorParams::mixed_1d(s).unwrap();
        let bump = Radial::bump(1, 0.8, 4.0);
        c.bench_function(&format!("frac_apply bump 1D s={s}"), |b| {
            b.iter(|| frac_apply(&bump, black_box(&[0.3]), &params, &quad))
        });
        let cn = params.c_ns();
        c.bench_function(&format!("reference_entry k=5 s={s}"), |b| {
            b.iter(|| reference_entry(black_box(5), s, cn))
        });
    }
    let params = OperatorParams::new(2, 0.5, mixlap_core::LocalSign::Minus).unwrap();
    let bump = Radial::bump(2, 0.8, 4.0);
    c.bench_function("frac_apply bump 2D s=0.5", |b| {
        b.iter(|| frac_apply(&bump, black_box(&[0.3, 0.1]), &params, &quad))
    });
}

criterion_group!(benches, kernels);
criterion_main!(benches);

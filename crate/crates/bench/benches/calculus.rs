use criterion::{criterion_group, criterion_main, Criterion};

use volterra_bench::{bench_poly, bench_weight};
use volterra_core::criteria::{self, TgOptions};
use volterra_core::kernels::{self, GNormKind};
use volterra_core::poly::CoefficientSeries;
use volterra_core::spaces;
use volterra_core::weight::RadialWeight;

fn moments(c: &mut Criterion) {
    c.bench_function("moment/closed-form", |b| {
        let w = bench_weight();
        let mut x = 1.0f64;
        b.iter(|| {
            x += 0.5; // defeat the cache
            w.moment(x).unwrap().value
        })
    });
    c.bench_function("moment/quadrature", |b| {
        let w = RadialWeight::parse("osc:base=std:alpha=1,amp=0.5,period=2").unwrap();
        let mut x = 1.0f64;
        b.iter(|| {
            x += 0.5;
            w.moment(x).unwrap().value
        })
    });
}

fn norms(c: &mut Criterion) {
    c.bench_function("norm/apw-deg64", |b| {
        let w = bench_weight();
        let f = bench_poly(64);
        b.iter(|| spaces::norm_apw_pth(&f, 1.5, &w).unwrap().value)
    });
    c.bench_function("norm/bmoa-deg64", |b| {
        let f = bench_poly(64);
        b.iter(|| spaces::bmoa_seminorm(&f))
    });
    c.bench_function("norm/zygmund-deg64", |b| {
        let f = bench_poly(64);
        b.iter(|| spaces::norm_zygmund(&f).value)
    });
}

fn criteria_scans(c: &mut Criterion) {
    c.bench_function("criteria/trivial-p2", |b| {
        let w = RadialWeight::standard(1.9, false).unwrap();
        b.iter(|| criteria::triviality_p_gt_1(2.0, &w).unwrap().verdict)
    });
    c.bench_function("criteria/tg-series-p2", |b| {
        let w = bench_weight();
        let g = CoefficientSeries::from_real(&[0.0, 1.0, 0.5]);
        b.iter(|| {
            criteria::bounded_tg(2.0, &w, &g, &TgOptions::default())
                .unwrap()
                .verdict
        })
    });
}

fn kernel_sup(c: &mut Criterion) {
    c.bench_function("kernels/sup-g-norm-zygmund", |b| {
        let nu = RadialWeight::parse("derived:dualw:p=0.75:base=std:alpha=1").unwrap();
        let g = CoefficientSeries::monomial(1);
        let zs = kernels::z_grid(10, 1);
        b.iter(|| {
            kernels::sup_g_norm(&g, &nu, &GNormKind::Zygmund, &zs, 128)
                .unwrap()
                .value
        })
    });
}

criterion_group!(benches, moments, norms, criteria_scans, kernel_sup);
criterion_main!(benches);

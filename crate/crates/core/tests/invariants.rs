//! Property-based invariants across the library: monotone moments and tails,
//! norm homogeneity, operator linearity, block-partition reassembly, and the
//! duality-pairing bound.

use num_complex::Complex64;
use proptest::prelude::*;

use volterra_core::dyadic;
use volterra_core::poly::CoefficientSeries;
use volterra_core::registry;
use volterra_core::spaces::{self, PairingKind};
use volterra_core::volterra::{apply_tg, apply_tg_quadrature, tg_series};
use volterra_core::weight::RadialWeight;

fn coeffs_strategy(max_len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..max_len)
}

fn series(v: &[(f64, f64)]) -> CoefficientSeries {
    CoefficientSeries::new(v.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn moments_decrease_in_x(widx in 0usize..9, x in 0.0f64..500.0, dx in 0.01f64..500.0) {
        let w = &registry::registry()[widx];
        let lo = w.moment(x + dx).unwrap().value;
        let hi = w.moment(x).unwrap().value;
        prop_assert!(lo <= hi * (1.0 + 1e-9), "{}: moment({}) = {} > moment({}) = {}", w.spec(), x + dx, lo, x, hi);
    }

    #[test]
    fn tails_decrease_in_r(widx in 0usize..9, u in 1e-4f64..1.0, shrink in 0.05f64..0.95) {
        let w = &registry::registry()[widx];
        let big = w.tail_u(u).unwrap().value;
        let small = w.tail_u(u * shrink).unwrap().value;
        prop_assert!(small <= big * (1.0 + 1e-9));
    }

    #[test]
    fn norm_homogeneity(v in coeffs_strategy(10), c in 0.1f64..5.0, p in 0.6f64..3.0) {
        let f = series(&v);
        prop_assume!(!f.is_zero());
        let w = RadialWeight::standard(0.5, false).unwrap();
        let base = spaces::norm_apw(&f, p, &w).unwrap().value;
        let scaled = spaces::norm_apw(&f.scale_real(c), p, &w).unwrap().value;
        prop_assert!((scaled - c * base).abs() <= 1e-10 * scaled.abs().max(1e-300));
    }

    #[test]
    fn tg_backends_agree(fv in coeffs_strategy(8), gv in coeffs_strategy(8), r in 0.0f64..1.0, t in 0.0f64..6.2) {
        let f = series(&fv);
        let g = series(&gv);
        let z = Complex64::from_polar(r, t);
        let a = apply_tg(&f, &g, z).unwrap();
        let b = apply_tg_quadrature(&f, &g, z);
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn tg_is_bilinear_and_vanishes_at_zero(fv in coeffs_strategy(8), gv in coeffs_strategy(8), c in -3.0f64..3.0) {
        let f = series(&fv);
        let g = series(&gv);
        let lhs = tg_series(&f.scale_real(c), &g);
        let rhs = tg_series(&f, &g).scale_real(c);
        let diff = lhs.sub(&rhs);
        prop_assert!(diff.coeffs().iter().all(|x| x.norm() < 1e-12));
        prop_assert_eq!(tg_series(&f, &g).coeff(0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn hadamard_commutes(fv in coeffs_strategy(10), gv in coeffs_strategy(10)) {
        let f = series(&fv);
        let g = series(&gv);
        prop_assert_eq!(dyadic::hadamard(&f, &g), dyadic::hadamard(&g, &f));
    }

    #[test]
    fn dyadic_blocks_reassemble(fv in coeffs_strategy(40)) {
        let f = series(&fv);
        let mut sum = CoefficientSeries::zero();
        for n in 0..7u32 {
            sum = sum.add(&dyadic::dyadic_block(&f, n));
        }
        prop_assert_eq!(sum, f);
    }

    #[test]
    fn calculus_roundtrip(fv in coeffs_strategy(12)) {
        let f = series(&fv);
        // primitive of f' recovers f - f(0)
        let back = f.derivative().primitive();
        let expect = f.sub(&CoefficientSeries::constant(f.coeff(0)));
        let diff = back.sub(&expect);
        prop_assert!(diff.coeffs().iter().all(|c| c.norm() < 1e-13));
    }

    #[test]
    fn circle_values_match_horner(fv in coeffs_strategy(9), r in 0.0f64..1.0) {
        let f = series(&fv);
        let vals = f.circle_values(r, 8);
        let n = vals.len();
        for m in (0..n).step_by(n / 8 + 1) {
            let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * m as f64 / n as f64);
            prop_assert!((vals[m] - f.eval(z)).norm() < 1e-11);
        }
    }
}

/// The duality-pairing bound: |⟨f,g⟩_{D²_ω}| is controlled by the (p, p')
/// Dirichlet norms plus the origin term.
#[test]
fn pairing_hoelder_bound() {
    let w = RadialWeight::standard(1.0, false).unwrap();
    let mut rng = volterra_core::rng::SplitMix64::new(99);
    for &p in &[1.5f64, 2.0, 3.0] {
        let pp = p / (p - 1.0);
        for _ in 0..12 {
            let f = CoefficientSeries::new(
                (0..=(1 + rng.below(10)))
                    .map(|_| Complex64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)))
                    .collect(),
            );
            let g = CoefficientSeries::new(
                (0..=(1 + rng.below(10)))
                    .map(|_| Complex64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)))
                    .collect(),
            );
            let lhs = spaces::pairing(&f, &g, &PairingKind::D2(w.clone()))
                .unwrap()
                .norm();
            let fa = spaces::norm_apw_pth(&f.derivative(), p, &w)
                .unwrap()
                .value
                .powf(1.0 / p);
            let ga = spaces::norm_apw_pth(&g.derivative(), pp, &w)
                .unwrap()
                .value
                .powf(1.0 / pp);
            let rhs = fa * ga + f.coeff(0).norm() * g.coeff(0).norm();
            assert!(
                lhs <= rhs * (1.0 + 1e-9),
                "p={p}: |pairing| = {lhs} > {rhs}"
            );
        }
    }
}

/// The moment table is a read-mostly cache shared across threads: concurrent
/// readers and writers must agree with the sequential values.
#[test]
fn moment_cache_is_thread_safe() {
    let w = RadialWeight::parse("osc:base=std:alpha=1,amp=0.5,period=2").unwrap();
    let sequential: Vec<f64> = (0..16).map(|k| w.moment(k as f64).unwrap().value).collect();
    let handles: Vec<_> = (0..4)
        .map(|t| {
            let w = w.clone();
            std::thread::spawn(move || {
                (0..16)
                    .map(|k| w.moment(((k + t) % 16) as f64).unwrap().value)
                    .collect::<Vec<f64>>()
            })
        })
        .collect();
    for (t, h) in handles.into_iter().enumerate() {
        let got = h.join().unwrap();
        for (k, v) in got.iter().enumerate() {
            assert_eq!(*v, sequential[(k + t) % 16], "thread {t} index {k}");
        }
    }
}

/// Verdict coherence on the registry: the compact-class triviality is never
/// strictly weaker than the bounded-class one.
#[test]
fn triviality_verdict_coherence() {
    use volterra_core::criteria;
    use volterra_core::report::Verdict;
    for w in registry::registry_dhat() {
        for &p in &[0.55, 0.75, 1.0] {
            let rep = criteria::triviality_p_le_1(p, &w, None).unwrap();
            if rep.verdict == Verdict::TrivialOnly {
                assert_ne!(
                    rep.compact_verdict,
                    Some(Verdict::Nontrivial),
                    "{} p={p}",
                    w.spec()
                );
            }
        }
    }
}

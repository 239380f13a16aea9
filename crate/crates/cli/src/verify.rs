//! The invariant verification suite behind `volterra verify`.
//!
//! Each check exercises one of the structural invariants of the library on
//! seeded corpora and the fixed weight registry, so a report is reproducible
//! byte-for-byte given the same seed.

use num_complex::Complex64;
use serde::Serialize;

use volterra_core::classify::{self, GridSpec};
use volterra_core::criteria::{self, TgOptions};
use volterra_core::dyadic;
use volterra_core::kernels::{self, GNormKind};
use volterra_core::poly::CoefficientSeries;
use volterra_core::registry;
use volterra_core::report::{Membership, Verdict};
use volterra_core::rng::SplitMix64;
use volterra_core::spaces::{self, PairingKind};
use volterra_core::volterra::{self, SourceSpace};
use volterra_core::weight::{DerivedKind, RadialWeight};

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

struct Harness {
    checks: Vec<Check>,
}

impl Harness {
    fn push(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    fn run(&mut self, name: &str, f: impl FnOnce() -> anyhow::Result<(bool, String)>) {
        match f() {
            Ok((pass, detail)) => self.push(name, pass, detail),
            Err(e) => self.push(name, false, format!("error: {e}")),
        }
    }
}

fn random_poly(rng: &mut SplitMix64, deg: usize, complex: bool) -> CoefficientSeries {
    let coeffs: Vec<Complex64> = (0..=deg)
        .map(|_| {
            let re = rng.range(-1.0, 1.0);
            let im = if complex { rng.range(-1.0, 1.0) } else { 0.0 };
            Complex64::new(re, im)
        })
        .collect();
    CoefficientSeries::new(coeffs)
}

pub fn run(suite: &str, seed: u64) -> anyhow::Result<VerifyReport> {
    let mut h = Harness { checks: Vec::new() };
    let all = suite == "all";
    match suite {
        "weights" | "classify" | "spaces" | "kernels" | "criteria" | "dyadic" | "volterra"
        | "all" => {}
        other => anyhow::bail!("unknown suite `{other}`"),
    }
    if all || suite == "weights" {
        suite_weights(&mut h);
    }
    if all || suite == "classify" {
        suite_classify(&mut h);
    }
    if all || suite == "spaces" {
        suite_spaces(&mut h, seed);
    }
    if all || suite == "kernels" {
        suite_kernels(&mut h, seed);
    }
    if all || suite == "criteria" {
        suite_criteria(&mut h);
    }
    if all || suite == "dyadic" {
        suite_dyadic(&mut h, seed);
    }
    if all || suite == "volterra" {
        suite_volterra(&mut h, seed);
    }
    let passed = h.checks.iter().filter(|c| c.pass).count();
    let failed = h.checks.len() - passed;
    Ok(VerifyReport {
        suite: suite.to_string(),
        seed,
        passed,
        failed,
        checks: h.checks,
    })
}

// ---------------------------------------------------------------------------

fn suite_weights(h: &mut Harness) {
    for w in registry::registry() {
        let spec = w.spec().to_string();
        h.run(&format!("weights/moment-monotone/{spec}"), || {
            let xs = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
            let mut prev = f64::INFINITY;
            for &x in &xs {
                let m = w.moment(x)?.value;
                if m > prev * (1.0 + 1e-9) {
                    return Ok((false, format!("moment increased at x={x}")));
                }
                prev = m;
            }
            Ok((true, String::new()))
        });
        h.run(&format!("weights/tail-monotone/{spec}"), || {
            let mut prev = f64::INFINITY;
            for j in 0..=16 {
                let t = w.tail_u(2f64.powi(-j))?.value;
                if t > prev * (1.0 + 1e-9) {
                    return Ok((false, format!("tail increased at 2^-{j}")));
                }
                prev = t;
            }
            Ok((true, String::new()))
        });
        h.run(&format!("weights/moment0-eq-tail0/{spec}"), || {
            let m = w.moment(0.0)?.value;
            let t = w.tail(0.0)?.value;
            let rel = (m - t).abs() / t;
            Ok((rel < 1e-8, format!("rel={rel:.2e}")))
        });
    }
    // dual-weight tail identity across the p grid
    for base_spec in ["std:alpha=0", "std:alpha=1", "std:alpha=-0.5"] {
        for p in [0.3, 0.5, 0.8] {
            h.run(
                &format!("weights/dualw-tail-identity/{base_spec}/p={p}"),
                || {
                    let base = RadialWeight::parse(base_spec)?;
                    let w = RadialWeight::derived(base.clone(), DerivedKind::DualW { p })?;
                    let mut worst: f64 = 0.0;
                    for j in 1..=12 {
                        let u = 2f64.powi(-j);
                        let lhs = w.tail_u(u)?.value;
                        let rhs = base.tail_u(u)?.value.powf(1.0 / p) * u.powf(1.0 / p - 1.0);
                        worst = worst.max((lhs - rhs).abs() / rhs);
                    }
                    Ok((worst < 1e-7, format!("max rel dev {worst:.2e}")))
                },
            );
        }
    }
    // pointwise h_ω bounds
    for base_spec in [
        "std:alpha=0",
        "std:alpha=1",
        "osc:base=std:alpha=1,amp=0.5,period=2",
    ] {
        for p in [1.0, 1.5, 2.0] {
            h.run(&format!("weights/hconv-upper/{base_spec}/p={p}"), || {
                let base = RadialWeight::parse(base_spec)?;
                let hw = RadialWeight::derived(base.clone(), DerivedKind::HConvolve { p })?;
                for j in 0..=10 {
                    let u = 2f64.powi(-j);
                    let lhs = hw.eval_u(u)?;
                    let rhs = base.tail_u(u)?.value * u.powf(p - 1.0);
                    if lhs > rhs * (1.0 + 1e-7) {
                        return Ok((false, format!("h > ω̂ u^(p-1) at u=2^-{j}")));
                    }
                }
                Ok((true, String::new()))
            });
        }
        for p in [1.5, 2.0] {
            h.run(
                &format!("weights/hconv-lower-band/{base_spec}/p={p}"),
                || {
                    let base = RadialWeight::parse(base_spec)?;
                    let hw = RadialWeight::derived(base.clone(), DerivedKind::HConvolve { p })?;
                    let mut lo = f64::INFINITY;
                    let mut hi: f64 = 0.0;
                    for j in 0..=10 {
                        let u = 2f64.powi(-j);
                        let ratio = hw.eval_u(u)? / (base.tail_u(u)?.value * u.powf(p - 1.0));
                        lo = lo.min(ratio);
                        hi = hi.max(ratio);
                    }
                    Ok((
                        lo > 0.0 && hi / lo < 10.0,
                        format!("c band [{lo:.3e},{hi:.3e}]"),
                    ))
                },
            );
        }
    }
    // radial Carleson-mass bound for 0 < p < 1
    for base_spec in [
        "std:alpha=0",
        "std:alpha=1",
        "osc:base=std:alpha=1,amp=0.5,period=2",
    ] {
        h.run(&format!("weights/carleson-mass/{base_spec}/p=0.5"), || {
            let p = 0.5;
            let base = RadialWeight::parse(base_spec)?;
            let hw = RadialWeight::derived(base.clone(), DerivedKind::HConvolve { p })?;
            let shifted =
                RadialWeight::derived(base.clone(), DerivedKind::TailQuotientShift { beta: p })?;
            let mut hi: f64 = 0.0;
            for j in 0..=10 {
                let u = 2f64.powi(-j);
                // ∫_a^1 h(s) s ds over u and the ω̃_[p] tail over u
                let s = *base.settings();
                let hw2 = hw.clone();
                let lhs = volterra_core::quad::integrate_to_zero(
                    &move |v: f64| hw2.eval_u(v).unwrap_or(f64::NAN) * (1.0 - v),
                    u,
                    &s,
                )?
                .value;
                let rhs = shifted.tail_u(u)?.value;
                hi = hi.max(lhs / rhs);
            }
            Ok((hi.is_finite() && hi < 16.0, format!("C = {hi:.3e}")))
        });
    }
}

fn suite_classify(h: &mut Harness) {
    h.run("classify/d-intersection", || {
        for w in registry::registry() {
            let grid = GridSpec::default_for(&w);
            let rep = classify::classify(&w, &grid)?;
            if let Some(d) = rep.d_member {
                let expect = rep.dhat.verdict == Membership::Member
                    && rep.dcheck.verdict == Membership::Member;
                if d != expect {
                    return Ok((false, format!("{}: D != D̂ ∩ Ď", w.spec())));
                }
            }
        }
        Ok((true, String::new()))
    });
    for spec in ["std:alpha=0", "std:alpha=1", "logpow:a=-1,b=-2"] {
        h.run(&format!("classify/refinement-monotone/{spec}"), || {
            let w = RadialWeight::parse(spec)?;
            let mut prev_c = 0.0;
            let mut prev_verdict: Option<Membership> = None;
            for depth in [10u32, 20, 40] {
                let m = classify::check_dhat(&w, &GridSpec::new(1, depth))?;
                if m.best_c < prev_c * (1.0 - 1e-9) {
                    return Ok((false, format!("C decreased at depth {depth}")));
                }
                if prev_verdict == Some(Membership::Member) && m.verdict == Membership::NonMember {
                    return Ok((
                        false,
                        format!("verdict flipped member→nonmember at depth {depth}"),
                    ));
                }
                prev_c = m.best_c;
                prev_verdict = Some(m.verdict);
            }
            Ok((true, String::new()))
        });
    }
    h.run("classify/moment-tail-band", || {
        let xs: Vec<f64> = (0..=32)
            .map(|i| 10f64.powf(4.0 * i as f64 / 32.0))
            .collect();
        let mut detail = String::new();
        for w in registry::registry_dhat() {
            let sweep = classify::verify_moment_tail(&w, &xs)?;
            let band = sweep.max_ratio / sweep.min_ratio;
            if !(band.is_finite() && band < 256.0) {
                return Ok((false, format!("{}: band {band:.3e}", w.spec())));
            }
            detail.push_str(&format!("{}:{band:.2}; ", w.spec()));
        }
        Ok((true, detail))
    });
    h.run("classify/moment-tail-unbounded-off-class", || {
        // the exponential weight's ratio must blow up
        let w = RadialWeight::parse("exp:c=1,gamma=1")?;
        let xs = [1.0, 10.0, 100.0, 1000.0];
        let sweep = classify::verify_moment_tail(&w, &xs)?;
        Ok((
            sweep.max_ratio / sweep.min_ratio > 1e3,
            format!("spread {:.3e}", sweep.max_ratio / sweep.min_ratio),
        ))
    });
}

fn suite_spaces(h: &mut Harness, seed: u64) {
    let w = RadialWeight::parse("std:alpha=1").unwrap();
    h.run("spaces/homogeneity", || {
        let mut rng = SplitMix64::new(seed ^ 0x5150);
        for i in 0..6 {
            let deg = 3 + rng.below(12);
            let f = random_poly(&mut rng, deg, true);
            let c = rng.range(0.5, 4.0);
            let fc = f.scale_real(c);
            let pairs = [
                (
                    spaces::norm_hp(&f, 1.5)?.value,
                    spaces::norm_hp(&fc, 1.5)?.value,
                ),
                (
                    spaces::norm_apw(&f, 0.7, &w)?.value,
                    spaces::norm_apw(&fc, 0.7, &w)?.value,
                ),
                (
                    spaces::norm_dpw(&f, 2.0, &w)?.value,
                    spaces::norm_dpw(&fc, 2.0, &w)?.value,
                ),
                (
                    spaces::norm_hlpw(&f, 1.0, &w)?.value,
                    spaces::norm_hlpw(&fc, 1.0, &w)?.value,
                ),
                (
                    spaces::norm_zygmund(&f).value,
                    spaces::norm_zygmund(&fc).value,
                ),
                (spaces::norm_bmoa(&f).value, spaces::norm_bmoa(&fc).value),
            ];
            for (j, (base, scaled)) in pairs.iter().enumerate() {
                if (scaled - c * base).abs() > 1e-10 * scaled.abs() {
                    return Ok((
                        false,
                        format!(
                            "poly {i} kind {j}: rel dev {:.2e}",
                            (scaled - c * base).abs() / scaled
                        ),
                    ));
                }
            }
        }
        Ok((true, String::new()))
    });
    h.run("spaces/p2-collapse", || {
        let mut rng = SplitMix64::new(seed ^ 0xA2);
        let mut worst: f64 = 0.0;
        for _ in 0..30 {
            let deg = 1 + rng.below(32);
            let f = random_poly(&mut rng, deg, true);
            let a = spaces::norm_apw_pth(&f, 2.0, &w)?.value;
            let hl = spaces::norm_hlpw_pth(&f, 2.0, &w)?.value;
            worst = worst.max((a - 2.0 * hl).abs() / a);
        }
        Ok((worst < 1e-8, format!("max rel dev {worst:.2e}")))
    });
    h.run("spaces/monomial-separation", || {
        // ‖z^n‖_A / ‖z^n‖_HL = (2 (n+1)^{2-p})^{1/p}: unbounded for p < 2,
        // vanishing for p > 2, via the two monomial identities
        for (p, growing) in [(1.0, true), (3.0, false)] {
            let ratio = |n: f64| (2.0 * (n + 1.0).powf(2.0 - p)).powf(1.0 / p);
            let (r0, r1) = (ratio(1.0), ratio(1024.0));
            let ok = if growing {
                r1 > 100.0 * r0
            } else {
                r1 < r0 / 4.0
            };
            if !ok {
                return Ok((false, format!("p={p}: {r0:.3e} → {r1:.3e}")));
            }
            // monotone trend across the dyadic scale
            let mut prev = r0;
            for j in 1..=10 {
                let r = ratio(2f64.powi(j));
                if growing && r <= prev || !growing && r >= prev {
                    return Ok((false, format!("p={p}: trend broke at n=2^{j}")));
                }
                prev = r;
            }
        }
        Ok((true, String::new()))
    });
    h.run("spaces/decreasing-coefficients-comparable", || {
        // f̂(n) = 1/(n+1): the three norms stay within a fixed factor
        let mut worst: f64 = 0.0;
        for deg in [16usize, 64, 256, 1024] {
            let coeffs: Vec<f64> = (0..=deg).map(|n| 1.0 / (n as f64 + 1.0)).collect();
            let f = CoefficientSeries::from_real(&coeffs);
            for p in [1.0, 2.0, 3.0] {
                let shifted =
                    RadialWeight::derived(w.clone(), DerivedKind::TailQuotientShift { beta: p })?;
                let a = spaces::norm_apw(&f, p, &w)?.value;
                let hl = spaces::norm_hlpw(&f, p, &w)?.value;
                let d = spaces::norm_dpw(&f, p, &shifted)?.value;
                let hi = a.max(hl).max(d);
                let lo = a.min(hl).min(d);
                worst = worst.max(hi / lo);
            }
        }
        Ok((worst < 32.0, format!("max pairwise factor {worst:.2}")))
    });
    h.run("spaces/inclusion-chain-constants", || {
        let mut rng = SplitMix64::new(seed ^ 0xC4A1);
        let corpus: Vec<CoefficientSeries> = (0..30)
            .map(|_| {
                let d = 1 + rng.below(24);
                random_poly(&mut rng, d, true)
            })
            .collect();
        let mut detail = String::new();
        for p in [1.0, 2.0, 3.0] {
            let shifted =
                RadialWeight::derived(w.clone(), DerivedKind::TailQuotientShift { beta: p })?;
            let mut c1: f64 = 0.0;
            let mut c2: f64 = 0.0;
            for f in &corpus {
                let a = spaces::norm_apw(f, p, &w)?.value;
                let hl = spaces::norm_hlpw(f, p, &w)?.value;
                let d = spaces::norm_dpw(f, p, &shifted)?.value;
                if p <= 2.0 {
                    c1 = c1.max(hl / a);
                    c2 = c2.max(a / d);
                } else {
                    c1 = c1.max(d / a);
                    c2 = c2.max(a / hl);
                }
            }
            if !(c1.is_finite() && c2.is_finite()) {
                return Ok((false, format!("p={p}: non-finite constants")));
            }
            detail.push_str(&format!("p={p}:C1={c1:.2},C2={c2:.2}; "));
        }
        Ok((true, detail))
    });
    h.run("spaces/pommerenke", || {
        let mut rng = SplitMix64::new(seed ^ 0x90E);
        for _ in 0..10 {
            let deg = 1 + rng.below(16);
            let f = random_poly(&mut rng, deg, true);
            for r in [0.5, 0.9] {
                let (lhs, rhs) = spaces::pommerenke_sides(&f, r)?;
                if lhs > rhs {
                    return Ok((false, format!("violated at r={r}")));
                }
            }
        }
        Ok((true, String::new()))
    });
}

fn suite_kernels(h: &mut Harness, seed: u64) {
    h.run("kernels/reproduction", || {
        let base = RadialWeight::constant();
        let nus = [
            base.clone(),
            RadialWeight::derived(base.clone(), DerivedKind::DualW { p: 0.75 })?,
            RadialWeight::derived(base.clone(), DerivedKind::TailProduct)?,
        ];
        let mut rng = SplitMix64::new(seed ^ 0x7E);
        let mut worst: f64 = 0.0;
        for nu in &nus {
            let ker = kernels::kernel(nu, 32)?;
            for _ in 0..20 {
                let deg = 1 + rng.below(32);
                let f = random_poly(&mut rng, deg, true);
                let zeta = Complex64::from_polar(
                    rng.range(0.0, 0.95),
                    rng.range(0.0, std::f64::consts::TAU),
                );
                let k = ker.at(zeta);
                let got = spaces::pairing(&f, &k, &PairingKind::D2(nu.clone()))?;
                let expect = f.eval(zeta);
                worst = worst.max((got - expect).norm() / (1.0 + expect.norm()));
            }
        }
        Ok((worst < 1e-9, format!("max dev {worst:.2e}")))
    });
    h.run("kernels/w-moment-asymptotics", || {
        // W_{2k-1} ≍ ω̂(1-1/k)^{1/p} k^{1-1/p}
        let base = RadialWeight::parse("std:alpha=1")?;
        for p in [0.5, 0.75] {
            let w = RadialWeight::derived(base.clone(), DerivedKind::DualW { p })?;
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            let mut ratios = Vec::new();
            for j in 0..=12 {
                let k = 2f64.powi(j);
                let lhs = w.moment(2.0 * k - 1.0)?.value;
                let rhs = base.tail_u(1.0 / k)?.value.powf(1.0 / p) * k.powf(1.0 - 1.0 / p);
                let r = lhs / rhs;
                ratios.push(r);
                lo = lo.min(r);
                hi = hi.max(r);
            }
            let settled = (ratios[12] / ratios[11] - 1.0).abs() < 0.05;
            if !(hi / lo < 64.0 && settled) {
                return Ok((
                    false,
                    format!(
                        "p={p}: band {:.2}, last step {:.3}",
                        hi / lo,
                        ratios[12] / ratios[11]
                    ),
                ));
            }
        }
        Ok((true, String::new()))
    });
    h.run("kernels/real-axis-extremal-for-nonneg", || {
        // nonnegative symbol: real-axis sup equals the full-grid sup
        let w = RadialWeight::constant();
        let nu = RadialWeight::derived(w, DerivedKind::DualW { p: 0.75 })?;
        let g = CoefficientSeries::monomial(1);
        let real = kernels::sup_g_norm(&g, &nu, &GNormKind::Zygmund, &kernels::z_grid(10, 1), 128)?;
        let full = kernels::sup_g_norm(&g, &nu, &GNormKind::Zygmund, &kernels::z_grid(10, 8), 128)?;
        let dev = (real.value - full.value).abs() / full.value;
        Ok((dev < 1e-6, format!("rel dev {dev:.2e}")))
    });
}

fn suite_criteria(h: &mut Harness) {
    h.run("criteria/lemma-aux-equivalence", || {
        // the sup form and the series form must render the same verdict
        let mut detail = String::new();
        for w in registry::registry_dhat() {
            for p in [0.55, 0.75, 1.0] {
                let a = criteria::triviality_p_le_1(p, &w, None)?.verdict;
                let b = criteria::series_form_p_le_1(p, &w, &[0.9])?.verdict;
                let contradiction = matches!(
                    (a, b),
                    (Verdict::TrivialOnly, Verdict::Nontrivial)
                        | (Verdict::Nontrivial, Verdict::TrivialOnly)
                );
                if contradiction {
                    return Ok((false, format!("{} p={p}: {a:?} vs {b:?}", w.spec())));
                }
                detail.push_str(&format!("{}|{p}:{a:?}/{b:?}; ", w.spec()));
            }
        }
        Ok((true, detail))
    });
    h.run("criteria/regime-consistency", || {
        // TrivialOnly for bounded implies TrivialOnly for compact, never the
        // reverse implication's failure
        for w in registry::registry_dhat() {
            for p in [0.55, 0.75, 1.0] {
                let rep = criteria::triviality_p_le_1(p, &w, None)?;
                if rep.verdict == Verdict::TrivialOnly
                    && rep.compact_verdict == Some(Verdict::Nontrivial)
                {
                    return Ok((false, format!("{} p={p}", w.spec())));
                }
            }
        }
        Ok((true, String::new()))
    });
    h.run("criteria/bergman-vs-dirichlet-pairs", || {
        // bookkeeping: record the verdict pairs that document the gap
        let mut detail = String::new();
        for w in registry::registry_dhat() {
            let d = criteria::triviality_p_gt_1(2.0, &w)?.verdict;
            let b = criteria::bergman_triviality(2.0, &w)?.verdict;
            detail.push_str(&format!("{}:D={d:?},A={b:?}; ", w.spec()));
        }
        Ok((true, detail))
    });
    h.run("criteria/symbol-monotonicity", || {
        let w = RadialWeight::constant();
        let opts = TgOptions::default();
        let g1 = CoefficientSeries::from_real(&[0.0, 1.0]);
        let g2 = CoefficientSeries::from_real(&[0.0, 1.0, 0.5, 0.25]);
        let v1 = criteria::bounded_tg(2.0, &w, &g1, &opts)?
            .summary
            .value
            .unwrap_or(0.0);
        let v2 = criteria::bounded_tg(2.0, &w, &g2, &opts)?
            .summary
            .value
            .unwrap_or(0.0);
        Ok((v1 <= v2, format!("{v1:.3e} <= {v2:.3e}")))
    });
    h.run("criteria/scaling", || {
        // p > 1: value scales by c^{p'}; p < 1: the sup quantity scales by c
        let g = CoefficientSeries::from_real(&[0.0, 1.0]);
        let opts = TgOptions::default();
        let w = RadialWeight::constant();
        let v1 = criteria::bounded_tg(2.0, &w, &g, &opts)?
            .summary
            .value
            .unwrap();
        let v3 = criteria::bounded_tg(2.0, &w, &g.scale_real(3.0), &opts)?
            .summary
            .value
            .unwrap();
        if (v3 - 9.0 * v1).abs() > 1e-8 * v3 {
            return Ok((false, format!("p=2: {v3:.6e} vs 9·{v1:.6e}")));
        }
        // bounded small-p case: the end-of-range standard weight
        let p = 0.75;
        let w = RadialWeight::standard(2.0 * p - 2.0, false)?;
        let a1 = criteria::bounded_tg(p, &w, &g, &opts)?
            .summary
            .value
            .unwrap();
        let a2 = criteria::bounded_tg(p, &w, &g.scale_real(2.0), &opts)?
            .summary
            .value
            .unwrap();
        Ok((
            (a2 - 2.0 * a1).abs() < 1e-6 * a2,
            format!("p<1: {a2:.6e} vs 2·{a1:.6e}"),
        ))
    });
    h.run("criteria/bounded-not-compact-example", || {
        // ω = (1-r)^{2p-2}: T_g bounded for polynomials yet not compact
        let p = 0.75;
        let w = RadialWeight::standard(2.0 * p - 2.0, false)?;
        let g = CoefficientSeries::monomial(1);
        let rep = criteria::bounded_tg(p, &w, &g, &TgOptions::default())?;
        Ok((
            rep.verdict == Verdict::Bounded && rep.compact_verdict == Some(Verdict::NotCompact),
            format!("{:?}/{:?}", rep.verdict, rep.compact_verdict),
        ))
    });
    h.run("criteria/small-p-threshold", || {
        // p <= 1/2 forces triviality on every verified upper-doubling weight
        for w in registry::registry_dhat() {
            let rep = criteria::triviality_p_le_1(0.5, &w, None)?;
            if rep.verdict != Verdict::TrivialOnly {
                return Ok((false, format!("{}: {:?}", w.spec(), rep.verdict)));
            }
        }
        Ok((true, String::new()))
    });
}

fn suite_dyadic(h: &mut Harness, seed: u64) {
    h.run("dyadic/partition-coverage", || {
        for w in registry::registry() {
            let levels = dyadic::feasible_levels(&w, 12);
            if levels < 2 {
                return Ok((false, format!("{}: no feasible levels", w.spec())));
            }
            let part = dyadic::omega_partition(&w, levels)?;
            let mut expected_lo = 0u64;
            for n in 0..part.levels() {
                let (lo, hi) = part.block(n);
                if lo != expected_lo || hi < lo {
                    return Ok((false, format!("{}: gap/overlap at block {n}", w.spec())));
                }
                expected_lo = hi;
            }
            if part.residual.iter().any(|r| *r > 1e-12) {
                return Ok((false, format!("{}: residual too large", w.spec())));
            }
        }
        Ok((true, String::new()))
    });
    h.run("dyadic/delta-band-stable", || {
        let mut detail = String::new();
        for p in [4.0 / 3.0, 2.0, 4.0] {
            let b1 = dyadic::delta_norm_sweep(p, 6)?.band();
            let b2 = dyadic::delta_norm_sweep(p, 12)?.band();
            if !(b2 <= b1 * 1.25 && b2 < 16.0) {
                return Ok((false, format!("p={p}: band {b1:.3} → {b2:.3}")));
            }
            detail.push_str(&format!("p={p:.3}:{b2:.3}; "));
        }
        Ok((true, detail))
    });
    h.run("dyadic/decomposition-band", || {
        let w = RadialWeight::constant();
        let part = dyadic::omega_partition(&w, 24)?;
        let mut rng = SplitMix64::new(seed ^ 0xDD);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for _ in 0..20 {
            let deg = 1 + rng.below(48);
            let f = random_poly(&mut rng, deg, true);
            let r = dyadic::decomposition_norm_check(2.0, &w, &part, &f)?;
            lo = lo.min(r.ratio);
            hi = hi.max(r.ratio);
        }
        Ok((hi / lo < 16.0, format!("band [{lo:.3},{hi:.3}]")))
    });
}

fn suite_volterra(h: &mut Harness, seed: u64) {
    h.run("volterra/backend-agreement", || {
        let mut rng = SplitMix64::new(seed ^ 0x77);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let deg = 1 + rng.below(12);
            let f = random_poly(&mut rng, deg, true);
            let dg = 1 + rng.below(12);
            let g = random_poly(&mut rng, dg, true);
            let z =
                Complex64::from_polar(rng.range(0.0, 1.0), rng.range(0.0, std::f64::consts::TAU));
            let a = volterra::apply_tg(&f, &g, z)?;
            let b = volterra::apply_tg_quadrature(&f, &g, z);
            worst = worst.max((a - b).norm() / (1.0 + a.norm()));
        }
        Ok((worst < 1e-12, format!("max dev {worst:.2e}")))
    });
    h.run("volterra/empirical-within-band", || {
        // empirical lower bounds stay below 10x the criterion-derived scale
        let mut detail = String::new();
        let cells: [(f64, &str); 3] = [
            (2.0, "std:alpha=0"),
            (1.0, "std:alpha=0"),
            (0.75, "std:alpha=-0.5"),
        ];
        for (p, spec) in cells {
            let w = RadialWeight::parse(spec)?;
            let g = CoefficientSeries::monomial(1);
            let family = volterra::default_family(p, &w, 7)?
                .into_iter()
                .filter(|(id, _)| {
                    !id.starts_with("z^") || id[2..].parse::<usize>().unwrap_or(0) <= 64
                })
                .collect::<Vec<_>>();
            let family: Vec<_> = family.into_iter().take(88).collect();
            let rep = volterra::consistency_report(p, &w, &g, &family, 256, 12)?;
            match rep.lower_to_scale {
                Some(c) if c <= 10.0 => detail.push_str(&format!("p={p}:{c:.2}; ")),
                Some(c) => return Ok((false, format!("p={p}: C = {c:.2} > 10"))),
                None => return Ok((false, format!("p={p}: no scale"))),
            }
        }
        Ok((true, detail))
    });
    h.run("volterra/family-growth-monotone", || {
        let w = RadialWeight::constant();
        let g = CoefficientSeries::monomial(1);
        let fam: Vec<(String, CoefficientSeries)> = (0..=64)
            .map(|n| (format!("z^{n}"), CoefficientSeries::monomial(n)))
            .collect();
        let small = volterra::empirical_opnorm(2.0, &w, &g, &fam[..16], SourceSpace::Dpw)?;
        let large = volterra::empirical_opnorm(2.0, &w, &g, &fam, SourceSpace::Dpw)?;
        Ok((
            large.lower_bound >= small.lower_bound,
            format!("{:.4e} → {:.4e}", small.lower_bound, large.lower_bound),
        ))
    });
}

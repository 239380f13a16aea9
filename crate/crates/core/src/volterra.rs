//! The Volterra-type operator T_g f(z) = ∫_0^z f g' and empirical
//! operator-norm lower bounds.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels;
use crate::poly::CoefficientSeries;
use crate::quad::{GL16_W, GL16_X};
use crate::rng::SplitMix64;
use crate::spaces;
use crate::weight::{DerivedKind, RadialWeight};

/// Coefficient-exact T_g f: the antiderivative of f·g' with value 0 at 0.
pub fn tg_series(f: &CoefficientSeries, g: &CoefficientSeries) -> CoefficientSeries {
    f.mul(&g.derivative()).primitive()
}

/// T_g f at z (|z| <= 1 is fine for polynomials).
pub fn apply_tg(f: &CoefficientSeries, g: &CoefficientSeries, z: Complex64) -> Result<Complex64> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "apply_tg needs |z| <= 1, got {}",
            z.norm()
        )));
    }
    Ok(tg_series(f, g).eval(z))
}

/// Path-integral backend: z ∫_0^1 f(tz) g'(tz) dt on 8 composite
/// Gauss–Legendre panels; used to cross-validate the coefficient backend.
pub fn apply_tg_quadrature(
    f: &CoefficientSeries,
    g: &CoefficientSeries,
    z: Complex64,
) -> Complex64 {
    let gp = g.derivative();
    let mut acc = Complex64::new(0.0, 0.0);
    let panels = 8;
    for p in 0..panels {
        let a = p as f64 / panels as f64;
        let b = (p + 1) as f64 / panels as f64;
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for i in 0..16 {
            let t = c + h * GL16_X[i];
            let zt = z * t;
            acc += GL16_W[i] * h * f.eval(zt) * gp.eval(zt);
        }
    }
    acc * z
}

/// max |f| on the unit circle (maximum principle), refined around the argmax.
pub fn hinf_norm(f: &CoefficientSeries) -> f64 {
    spaces::angular_max(f, 1.0)
}

/// Which source-space norm the empirical estimate divides by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SourceSpace {
    Dpw,
    Apw,
    Hlpw,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorEstimate {
    pub family: String,
    pub size: usize,
    /// max over the family of ‖T_g f‖_∞ / ‖f‖; a LOWER BOUND on the operator
    /// norm by definition — never evidence of unboundedness
    pub lower_bound: f64,
    pub maximizer: String,
    pub source: SourceSpace,
}

/// Default test family: monomials z^n (n <= 256), seeded random polynomials
/// of degree <= 64, and truncated kernel sections of the regime's pairing
/// weight.
pub fn default_family(
    p: f64,
    w: &RadialWeight,
    seed: u64,
) -> Result<Vec<(String, CoefficientSeries)>> {
    let mut fam: Vec<(String, CoefficientSeries)> = Vec::new();
    for n in 0..=256usize {
        fam.push((format!("z^{n}"), CoefficientSeries::monomial(n)));
    }
    let mut rng = SplitMix64::new(seed);
    for i in 0..50 {
        let deg = 4 + rng.below(61);
        let coeffs: Vec<Complex64> = (0..=deg)
            .map(|_| Complex64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)))
            .collect();
        fam.push((format!("rand{i}"), CoefficientSeries::new(coeffs)));
    }
    // kernel sections of the pairing weight matching the regime
    let nu = if p > 1.0 {
        w.clone()
    } else if p == 1.0 {
        RadialWeight::derived(w.clone(), DerivedKind::TailProduct)?
    } else {
        RadialWeight::derived(w.clone(), DerivedKind::DualW { p })?
    };
    let ker = kernels::kernel(&nu, 64)?;
    for &zeta in &[0.5, 0.9, 0.99] {
        fam.push((format!("K_{zeta}"), ker.at(Complex64::new(zeta, 0.0))));
    }
    Ok(fam)
}

/// Empirical operator-norm lower bound over a family of test functions.
pub fn empirical_opnorm(
    p: f64,
    w: &RadialWeight,
    g: &CoefficientSeries,
    family: &[(String, CoefficientSeries)],
    source: SourceSpace,
) -> Result<OperatorEstimate> {
    let mut best = (0.0f64, String::new());
    for (id, f) in family {
        let denom = match source {
            SourceSpace::Dpw => spaces::norm_dpw(f, p, w)?.value,
            SourceSpace::Apw => spaces::norm_apw(f, p, w)?.value,
            SourceSpace::Hlpw => spaces::norm_hlpw(f, p, w)?.value,
        };
        if !(denom > 0.0) {
            return Err(Error::Domain(format!(
                "family member {id} has zero norm in the source space"
            )));
        }
        let num = hinf_norm(&tg_series(f, g));
        let ratio = num / denom;
        if ratio > best.0 {
            best = (ratio, id.clone());
        }
    }
    Ok(OperatorEstimate {
        family: "monomials+seeded+kernel-sections".into(),
        size: family.len(),
        lower_bound: best.0,
        maximizer: best.1,
        source,
    })
}

/// Bundle of the empirical lower bound, the criterion value, and the
/// kernel-based sup surrogate for one (p, ω, g).
///
/// `lower_to_scale` records the constant C in lower_bound <= C · scale where
/// scale is the criterion value raised to the operator-norm exponent of the
/// regime (1/p' for p > 1, 1/2 for p = 1, 1 for p < 1). Upper-bound tightness
/// is never asserted.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub p: f64,
    pub weight: String,
    pub verdict: crate::report::Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opnorm_scale: Option<f64>,
    pub lower_bound: f64,
    pub kernel_sup: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_to_scale: Option<f64>,
}

pub fn consistency_report(
    p: f64,
    w: &RadialWeight,
    g: &CoefficientSeries,
    family: &[(String, CoefficientSeries)],
    k_max: usize,
    z_depth: u32,
) -> Result<ConsistencyReport> {
    let crit = crate::criteria::bounded_tg(p, w, g, &crate::criteria::TgOptions::default())?;
    let est = empirical_opnorm(p, w, g, family, SourceSpace::Dpw)?;
    let (nu, kind) = if p > 1.0 {
        (
            w.clone(),
            kernels::GNormKind::Dpw {
                p: p / (p - 1.0),
                weight: w.clone(),
            },
        )
    } else if p == 1.0 {
        (
            RadialWeight::derived(w.clone(), DerivedKind::TailProduct)?,
            kernels::GNormKind::BmoaPrimeInf(w.clone()),
        )
    } else {
        (
            RadialWeight::derived(w.clone(), DerivedKind::DualW { p })?,
            kernels::GNormKind::Zygmund,
        )
    };
    let zs = kernels::z_grid(z_depth, 1);
    let sup = kernels::sup_g_norm(g, &nu, &kind, &zs, k_max)?;
    let criterion_value = crit.summary.value.or(crit.summary.sup_estimate);
    let scale = criterion_value.map(|v| {
        if p > 1.0 {
            v.powf((p - 1.0) / p)
        } else if p == 1.0 {
            v.sqrt()
        } else {
            v
        }
    });
    Ok(ConsistencyReport {
        p,
        weight: w.spec().to_string(),
        verdict: crit.verdict,
        criterion_value,
        opnorm_scale: scale,
        lower_bound: est.lower_bound,
        kernel_sup: sup.value,
        lower_to_scale: scale.and_then(|s| {
            if s > 0.0 {
                Some(est.lower_bound / s)
            } else {
                None
            }
        }),
    })
}

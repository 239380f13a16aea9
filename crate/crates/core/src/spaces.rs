//! Norms and pairings on polynomials and truncated series: integral means,
//! weighted Bergman/Dirichlet norms, coefficient (Hardy–Littlewood) norms,
//! Zygmund/Bloch/BMOA norms, and the weighted pairings used for duality
//! checks.
//!
//! All space norms are defined on polynomials only; truncation of analytic
//! inputs is the caller's responsibility.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::CoefficientSeries;
use crate::quad::{self, Qty, QuadSettings};
use crate::weight::RadialWeight;

/// A computed norm with its kind label and an error estimate.
#[derive(Debug, Clone)]
pub struct NormValue {
    pub kind: String,
    pub value: f64,
    pub err: f64,
}

impl NormValue {
    fn new(kind: impl Into<String>, value: f64, err: f64) -> Self {
        NormValue {
            kind: kind.into(),
            value,
            err,
        }
    }
}

fn require_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!(
            "exponent p must be positive, got {p}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// integral means on circles
// ---------------------------------------------------------------------------

/// Mean of |f|^p over the circle of radius r, via uniform angular quadrature
/// with at least 8·(degree+1) nodes (power of two). Exact for trigonometric
/// polynomials when p = 2. A single-term series has an angularly constant
/// modulus, so its mean is taken directly.
pub fn mean_p_pow(f: &CoefficientSeries, p: f64, r: f64) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let mut nonzero = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() != 0.0);
    if let (Some((n, c)), None) = (nonzero.next(), nonzero.next()) {
        return (c.norm() * r.powi(n as i32)).powf(p);
    }
    let vals = f.circle_values(r, 8);
    let n = vals.len() as f64;
    vals.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n
}

/// M_p(r, f) with a node-halving error estimate.
pub fn norm_hp_at(f: &CoefficientSeries, p: f64, r: f64) -> Result<NormValue> {
    require_p(p)?;
    if f.is_zero() {
        return Ok(NormValue::new(format!("Hp({p})"), 0.0, 0.0));
    }
    let vals = f.circle_values(r, 8);
    let n = vals.len();
    let full: f64 = vals.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n as f64;
    let half: f64 = vals
        .iter()
        .step_by(2)
        .map(|v| v.norm().powf(p))
        .sum::<f64>()
        / (n / 2) as f64;
    let value = full.powf(1.0 / p);
    let err = (full - half).abs().powf(1.0 / p).min(value);
    Ok(NormValue::new(format!("Hp({p})"), value, err))
}

/// H^p norm of a polynomial (radius 1; the maximum principle makes this the
/// boundary integral mean).
pub fn norm_hp(f: &CoefficientSeries, p: f64) -> Result<NormValue> {
    norm_hp_at(f, p, 1.0)
}

// ---------------------------------------------------------------------------
// weighted Bergman / Dirichlet / Hardy-Littlewood norms
// ---------------------------------------------------------------------------

/// ‖f‖_{A^p_ω}^p = ∫_D |f|^p ω dA with dA = dx dy / π, computed as
/// ∫_0^1 M_p^p(r, f) · 2 ω(r) r dr by radial quadrature over u = 1-r.
pub fn norm_apw_pth(f: &CoefficientSeries, p: f64, w: &RadialWeight) -> Result<Qty> {
    require_p(p)?;
    if f.is_zero() {
        return Ok(Qty {
            value: 0.0,
            err: 0.0,
        });
    }
    let s = QuadSettings {
        abs_tol: 1e-13,
        rel_tol: 3e-11,
        ..*w.settings()
    };
    let fc = f.clone();
    let wc = w.clone();
    quad::integrate_to_zero(
        &move |u: f64| {
            let r = 1.0 - u;
            mean_p_pow(&fc, p, r) * 2.0 * wc.eval_u(u).unwrap_or(f64::NAN) * r
        },
        1.0,
        &s,
    )
}

pub fn norm_apw(f: &CoefficientSeries, p: f64, w: &RadialWeight) -> Result<NormValue> {
    let q = norm_apw_pth(f, p, w)?;
    let value = q.value.max(0.0).powf(1.0 / p);
    let err = if q.value > 0.0 {
        value * q.err / (p * q.value)
    } else {
        q.err
    };
    Ok(NormValue::new(format!("Apw({p},{})", w.spec()), value, err))
}

/// ‖f‖_{D^p_ω}^p = ‖f'‖_{A^p_ω}^p + |f(0)|^p.
pub fn norm_dpw_pth(f: &CoefficientSeries, p: f64, w: &RadialWeight) -> Result<Qty> {
    let d = norm_apw_pth(&f.derivative(), p, w)?;
    let f0 = f.coeff(0).norm().powf(p);
    Ok(Qty {
        value: d.value + f0,
        err: d.err,
    })
}

pub fn norm_dpw(f: &CoefficientSeries, p: f64, w: &RadialWeight) -> Result<NormValue> {
    let q = norm_dpw_pth(f, p, w)?;
    let value = q.value.max(0.0).powf(1.0 / p);
    let err = if q.value > 0.0 {
        value * q.err / (p * q.value)
    } else {
        q.err
    };
    Ok(NormValue::new(format!("Dpw({p},{})", w.spec()), value, err))
}

/// ‖f‖_{HL^ω_p}^p = Σ |f̂(n)|^p (n+1)^{p-2} ω_{np+1}.
pub fn norm_hlpw_pth(f: &CoefficientSeries, p: f64, w: &RadialWeight) -> Result<Qty> {
    require_p(p)?;
    let mut value = 0.0;
    let mut err = 0.0;
    for (n, c) in f.coeffs().iter().enumerate() {
        let a = c.norm();
        if a == 0.0 {
            continue;
        }
        let m = w.moment(n as f64 * p + 1.0)?;
        let factor = a.powf(p) * (n as f64 + 1.0).powf(p - 2.0);
        value += factor * m.value;
        err += factor * m.err;
    }
    Ok(Qty { value, err })
}

pub fn norm_hlpw(f: &CoefficientSeries, p: f64, w: &RadialWeight) -> Result<NormValue> {
    let q = norm_hlpw_pth(f, p, w)?;
    let value = q.value.max(0.0).powf(1.0 / p);
    let err = if q.value > 0.0 {
        value * q.err / (p * q.value)
    } else {
        q.err
    };
    Ok(NormValue::new(
        format!("Hlpw({p},{})", w.spec()),
        value,
        err,
    ))
}

// ---------------------------------------------------------------------------
// sup-type norms: H^∞, Bloch, Zygmund
// ---------------------------------------------------------------------------

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Max of |f| over the circle of radius r: grid scan plus golden refinement
/// around the argmax.
pub fn angular_max(f: &CoefficientSeries, r: f64) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    if f.is_nonneg_real() {
        // nonnegative coefficients: the modulus peaks on the positive axis
        return f.eval(Complex64::new(r, 0.0)).norm();
    }
    let vals = f.circle_values(r, 8);
    let n = vals.len();
    let (i0, _) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap();
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let t0 = i0 as f64 * step;
    let eval = |t: f64| f.eval(Complex64::from_polar(r, t)).norm();
    let (_, v) = golden_max(&eval, t0 - step, t0 + step, 60);
    v.max(vals[i0].norm())
}

/// sup over the disc of |h(z)| φ(|z|) for a decaying radial factor φ.
fn sup_weighted_modulus<P: Fn(f64) -> f64>(h: &CoefficientSeries, phi: &P) -> f64 {
    if h.is_zero() {
        return 0.0;
    }
    let deg = h.degree().unwrap_or(0);
    let mut radii: Vec<f64> = (0..64).map(|i| i as f64 / 64.0).collect();
    let ladder_max = ((deg as f64 + 2.0).log2().ceil() as i32 + 8).clamp(6, 48);
    for j in 6..=ladder_max {
        radii.push(1.0 - 2f64.powi(-j));
    }
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let score = |r: f64| angular_max(h, r) * phi(r);
    let mut best = (0.0f64, score(0.0));
    for &r in &radii {
        let v = score(r);
        if v > best.1 {
            best = (r, v);
        }
    }
    // radial refinement around the best node
    let lo = (best.0 - 0.02).max(0.0);
    let hi = (best.0 + 0.02).min(1.0 - 1e-12);
    let (_, v) = golden_max(&score, lo, hi, 80);
    v.max(best.1)
}

/// ‖f‖_Z = sup |f''(z)|(1-|z|²) + |f'(0)| + |f(0)|.
pub fn norm_zygmund(f: &CoefficientSeries) -> NormValue {
    let sup = sup_weighted_modulus(&f.derivative().derivative(), &|r| 1.0 - r * r);
    let value = sup + f.coeff(1).norm() + f.coeff(0).norm();
    NormValue::new("Zygmund", value, 1e-9 * value)
}

/// Bloch seminorm sup |f'(z)|(1-|z|²).
pub fn bloch_seminorm(f: &CoefficientSeries) -> f64 {
    sup_weighted_modulus(&f.derivative(), &|r| 1.0 - r * r)
}

/// ‖f‖_B = |f(0)| + sup |f'(z)|(1-|z|²).
pub fn norm_bloch(f: &CoefficientSeries) -> NormValue {
    let value = bloch_seminorm(f) + f.coeff(0).norm();
    NormValue::new("Bloch", value, 1e-9 * value)
}

// ---------------------------------------------------------------------------
// BMOA and its weighted boundary-scaled variants
// ---------------------------------------------------------------------------

/// ‖f∘φ_a - f(a)‖_{H²}² for the Möbius involution φ_a(z) = (a-z)/(1-āz).
///
/// φ_a is inner, so on the circle φ_a^j conj(φ_a^k) integrates to the mean of
/// the analytic function φ_a^{j-k}, i.e. a^{j-k}; with the autocorrelation
/// A_d = Σ f̂(k+d) conj(f̂(k)) the angular quadrature collapses to
/// A_0 + 2 Re Σ_{d≥1} A_d a^d - |f(a)|².
pub fn mobius_h2_sq(f: &CoefficientSeries, autocorr: &[Complex64], a: Complex64) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut ad = Complex64::new(1.0, 0.0);
    for corr in autocorr.iter().skip(1) {
        ad *= a;
        acc += corr * ad;
    }
    let total = autocorr[0].re + 2.0 * acc.re - f.eval(a).norm_sqr();
    total.max(0.0)
}

/// BMOA seminorm: sup over an a-grid (radial ladder × 16 angles) of
/// ‖f∘φ_a - f(a)‖_{H²}, with golden refinement in |a|.
pub fn bmoa_seminorm(f: &CoefficientSeries) -> f64 {
    if f.is_zero() || f.degree() == Some(0) {
        return 0.0;
    }
    let ac = f.autocorrelation();
    let angles = 16usize;
    let mut radii: Vec<f64> = (0..16).map(|i| i as f64 / 16.0).collect();
    for j in 4..=16 {
        radii.push(1.0 - 2f64.powi(-j));
    }
    let origin = Complex64::new(0.0, 0.0);
    let mut best = (origin, mobius_h2_sq(f, &ac, origin));
    for &r in &radii {
        for i in 0..angles {
            let t = 2.0 * std::f64::consts::PI * i as f64 / angles as f64;
            let a = Complex64::from_polar(r, t);
            let v = mobius_h2_sq(f, &ac, a);
            if v > best.1 {
                best = (a, v);
            }
        }
    }
    // refine along the ray of the best angle
    let theta = best.0.arg();
    let score = |r: f64| mobius_h2_sq(f, &ac, Complex64::from_polar(r, theta));
    let r0 = best.0.norm();
    let (_, v) = golden_max(
        &score,
        (r0 - 0.07).max(0.0),
        (r0 + 0.07).min(1.0 - 1e-9),
        80,
    );
    v.max(best.1).sqrt()
}

/// BMOA norm: seminorm + |f(0)|.
pub fn norm_bmoa(f: &CoefficientSeries) -> NormValue {
    let value = bmoa_seminorm(f) + f.coeff(0).norm();
    NormValue::new("BMOA", value, 1e-8 * value)
}

/// ‖f‖_{BMOA(∞,ω)} = sup_{0≤r<1} ‖f_r‖_BMOA · ω̂(r).
pub fn norm_bmoa_inf(f: &CoefficientSeries, w: &RadialWeight) -> Result<NormValue> {
    if f.is_zero() {
        return Ok(NormValue::new(format!("BmoaInf({})", w.spec()), 0.0, 0.0));
    }
    let score = |r: f64| -> f64 {
        let fr = f.dilate(r);
        let b = bmoa_seminorm(&fr) + fr.coeff(0).norm();
        b * w.tail(r).map(|q| q.value).unwrap_or(f64::NAN)
    };
    let mut radii: Vec<f64> = (0..32).map(|i| i as f64 / 32.0).collect();
    for j in 5..=16 {
        radii.push(1.0 - 2f64.powi(-j));
    }
    let mut best = (0.0, score(0.0));
    for &r in &radii {
        let v = score(r);
        if v > best.1 {
            best = (r, v);
        }
    }
    let (_, v) = golden_max(
        &score,
        (best.0 - 0.04).max(0.0),
        (best.0 + 0.04).min(1.0 - 1e-9),
        70,
    );
    let value = v.max(best.1);
    Ok(NormValue::new(
        format!("BmoaInf({})", w.spec()),
        value,
        1e-7 * value,
    ))
}

/// ‖f‖_{BMOA'(∞,ω)} = ‖f'‖_{BMOA(∞,ω)} + |f(0)|.
pub fn norm_bmoa_prime_inf(f: &CoefficientSeries, w: &RadialWeight) -> Result<NormValue> {
    let inner = norm_bmoa_inf(&f.derivative(), w)?;
    let value = inner.value + f.coeff(0).norm();
    Ok(NormValue::new(
        format!("BmoaPrimeInf({})", w.spec()),
        value,
        inner.err,
    ))
}

// ---------------------------------------------------------------------------
// pairings
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum PairingKind {
    /// ⟨f,g⟩_{A²_ν} = 2 Σ f̂(n) conj(ĝ(n)) ν_{2n+1}
    A2(RadialWeight),
    /// ⟨f,g⟩_{D²_ν} = ⟨f',g'⟩_{A²_ν} + f(0) conj(g(0))
    D2(RadialWeight),
    /// Σ f̂(n) conj(ĝ(n)) ω_{2n+1} (the limit r→1 is trivial for polynomials)
    Hl(RadialWeight),
}

pub fn pairing(
    f: &CoefficientSeries,
    g: &CoefficientSeries,
    kind: &PairingKind,
) -> Result<Complex64> {
    match kind {
        PairingKind::A2(w) => coeff_pairing(f, g, w, 2.0),
        PairingKind::Hl(w) => coeff_pairing(f, g, w, 1.0),
        PairingKind::D2(w) => {
            let d = coeff_pairing(&f.derivative(), &g.derivative(), w, 2.0)?;
            Ok(d + f.coeff(0) * g.coeff(0).conj())
        }
    }
}

fn coeff_pairing(
    f: &CoefficientSeries,
    g: &CoefficientSeries,
    w: &RadialWeight,
    scale: f64,
) -> Result<Complex64> {
    let n = f.len().min(g.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let prod = f.coeff(k) * g.coeff(k).conj();
        if prod.norm() == 0.0 {
            continue;
        }
        acc += prod * w.moment(2.0 * k as f64 + 1.0)?.value;
    }
    Ok(acc * scale)
}

// ---------------------------------------------------------------------------
// growth means
// ---------------------------------------------------------------------------

/// (M_1, M_p, M_∞) at radius r.
pub fn growth_means(f: &CoefficientSeries, p: f64, r: f64) -> Result<(f64, f64, f64)> {
    require_p(p)?;
    if f.is_zero() {
        return Ok((0.0, 0.0, 0.0));
    }
    let vals = f.circle_values(r, 8);
    let n = vals.len() as f64;
    let m1 = vals.iter().map(|v| v.norm()).sum::<f64>() / n;
    let mp = (vals.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n).powf(1.0 / p);
    let minf = angular_max(f, r);
    Ok((m1, mp, minf))
}

/// Both sides of the growth-mean inequality ∫_0^r M_∞(t,f) dt ≤ π r M_1(r,f).
pub fn pommerenke_sides(f: &CoefficientSeries, r: f64) -> Result<(f64, f64)> {
    let fc = f.clone();
    let s = QuadSettings::default();
    let lhs = quad::adaptive(&move |t: f64| angular_max(&fc, t), 0.0, r, &s)?.value;
    let m1 = growth_means(f, 1.0, r)?.0;
    Ok((lhs, std::f64::consts::PI * r * m1))
}

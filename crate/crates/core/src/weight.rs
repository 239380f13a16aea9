//! Radial weights ω on [0,1): evaluation, tail integrals ω̂, moments ω_x,
//! and the derived weights built from them.
//!
//! Everything near the boundary is driven in the variable u = 1 - r. Closed
//! forms are kept in log space as well, so tail and moment scans can reach
//! depths far beyond what f64 linear arithmetic represents.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, LogSum, Qty, QuadSettings, GL16_W, GL16_X};
use crate::special::{lbeta, lgamma};

/// Transforms producing derived weights from a base weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivedKind {
    /// ω̃_[β] = ω̂(r)·(1-r)^{β-1}
    TailQuotientShift { beta: f64 },
    /// ω_[β] = ω(r)·(1-r)^β
    PowerShift { beta: f64 },
    /// W_{p,ω} = (1/p-1)·ω̂^{1/p}(1-r)^{1/p-2} + (ω/p)·ω̂^{1/p-1}(1-r)^{1/p-1}
    DualW { p: f64 },
    /// ω·ω̂
    TailProduct,
    /// h_ω(r) = ∫_r^1 (t-r)^{p-1} ω(t) dt
    HConvolve { p: f64 },
}

#[derive(Debug, Clone)]
pub struct Tabulated {
    /// ascending in u = 1-r
    u: Vec<f64>,
    ln_u: Vec<f64>,
    ln_v: Vec<f64>,
    /// power-law continuation v = c·u^s beyond the deep end of the hull
    cont_deep: (f64, f64),
    /// continuation beyond the shallow end (u > u_max)
    cont_shallow: (f64, f64),
}

#[derive(Debug, Clone)]
pub enum WeightKind {
    Standard {
        alpha: f64,
        normalized: bool,
    },
    Exponential {
        c: f64,
        gamma: f64,
    },
    LogPower {
        a: f64,
        b: f64,
    },
    Oscillating {
        base: RadialWeight,
        amplitude: f64,
        period: f64,
    },
    Tabulated(Tabulated),
    Derived {
        base: RadialWeight,
        transform: DerivedKind,
    },
}

struct Inner {
    kind: WeightKind,
    spec: String,
    settings: QuadSettings,
    moments: RwLock<HashMap<u64, Qty>>,
    tails: RwLock<HashMap<u64, Qty>>,
    mass: OnceLock<Qty>,
}

/// A radial weight with cached tolerance-tagged moments and tails.
#[derive(Clone)]
pub struct RadialWeight {
    inner: Arc<Inner>,
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialWeight({})", self.inner.spec)
    }
}

impl fmt::Display for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.inner.spec)
    }
}

fn fmt_f64(x: f64) -> String {
    // shortest representation that round-trips
    let mut s = format!("{x}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str("");
    }
    s
}

fn canonical(kind: &WeightKind) -> String {
    match kind {
        WeightKind::Standard { alpha, normalized } => {
            if *normalized {
                format!("std:alpha={},norm", fmt_f64(*alpha))
            } else {
                format!("std:alpha={}", fmt_f64(*alpha))
            }
        }
        WeightKind::Exponential { c, gamma } => {
            format!("exp:c={},gamma={}", fmt_f64(*c), fmt_f64(*gamma))
        }
        WeightKind::LogPower { a, b } => format!("logpow:a={},b={}", fmt_f64(*a), fmt_f64(*b)),
        WeightKind::Oscillating {
            base,
            amplitude,
            period,
        } => format!(
            "osc:base={},amp={},period={}",
            base.spec(),
            fmt_f64(*amplitude),
            fmt_f64(*period)
        ),
        WeightKind::Tabulated(t) => format!("table:<{} nodes>", t.u.len()),
        WeightKind::Derived { base, transform } => match transform {
            DerivedKind::TailQuotientShift { beta } => {
                format!(
                    "derived:tailshift:beta={}:base={}",
                    fmt_f64(*beta),
                    base.spec()
                )
            }
            DerivedKind::PowerShift { beta } => {
                format!(
                    "derived:powershift:beta={}:base={}",
                    fmt_f64(*beta),
                    base.spec()
                )
            }
            DerivedKind::DualW { p } => {
                format!("derived:dualw:p={}:base={}", fmt_f64(*p), base.spec())
            }
            DerivedKind::TailProduct => format!("derived:tailprod:base={}", base.spec()),
            DerivedKind::HConvolve { p } => {
                format!("derived:hconv:p={}:base={}", fmt_f64(*p), base.spec())
            }
        },
    }
}

impl RadialWeight {
    pub fn new(kind: WeightKind) -> Result<Self> {
        Self::with_settings(kind, QuadSettings::default())
    }

    pub fn with_settings(kind: WeightKind, settings: QuadSettings) -> Result<Self> {
        validate(&kind)?;
        let spec = canonical(&kind);
        let w = RadialWeight {
            inner: Arc::new(Inner {
                kind,
                spec,
                settings,
                moments: RwLock::new(HashMap::new()),
                tails: RwLock::new(HashMap::new()),
                mass: OnceLock::new(),
            }),
        };
        // Mass must be finite and positive; this also validates integrability
        // of derived transforms up front.
        let m = w.mass_qty()?;
        if !(m.value.is_finite() && m.value > 0.0) {
            return Err(Error::InvalidWeight(format!(
                "weight {} has non-positive or non-finite mass {}",
                w.spec(),
                m.value
            )));
        }
        Ok(w)
    }

    pub fn standard(alpha: f64, normalized: bool) -> Result<Self> {
        Self::new(WeightKind::Standard { alpha, normalized })
    }

    /// The constant weight ω ≡ 1.
    pub fn constant() -> Self {
        Self::standard(0.0, false).expect("constant weight is valid")
    }

    pub fn derived(base: RadialWeight, transform: DerivedKind) -> Result<Self> {
        Self::new(WeightKind::Derived { base, transform })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.inner.kind
    }

    /// Canonical spec string; doubles as the cache identity.
    pub fn spec(&self) -> &str {
        &self.inner.spec
    }

    pub fn settings(&self) -> &QuadSettings {
        &self.inner.settings
    }

    /// FNV-1a hash of the canonical spec, for cache invalidation.
    pub fn spec_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.inner.spec.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        h
    }

    // ------------------------------------------------------------------
    // evaluation
    // ------------------------------------------------------------------

    /// ω(r) for r in [0, 1).
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("eval requires r in [0,1), got {r}")));
        }
        self.eval_u(1.0 - r)
    }

    /// ω(1-u) for u in (0, 1].
    pub fn eval_u(&self, u: f64) -> Result<f64> {
        self.eval_u_inner(u, true)
    }

    /// Like `eval_u`, but tabulated weights use their power-law continuation
    /// outside the node hull. Integration internals go through this.
    fn eval_u_cont(&self, u: f64) -> Result<f64> {
        self.eval_u_inner(u, false)
    }

    fn eval_u_inner(&self, u: f64, strict: bool) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::Domain(format!(
                "eval_u requires u in (0,1], got {u}"
            )));
        }
        match &self.inner.kind {
            WeightKind::Standard { alpha, normalized } => {
                if *normalized {
                    Ok((alpha + 1.0) * (u * (2.0 - u)).powf(*alpha))
                } else {
                    Ok(u.powf(*alpha))
                }
            }
            WeightKind::Exponential { c, gamma } => Ok((-c * u.powf(-gamma)).exp()),
            WeightKind::LogPower { a, b } => Ok(u.powf(*a) * (1.0 - u.ln()).powf(*b)),
            WeightKind::Oscillating {
                base,
                amplitude,
                period,
            } => Ok(base.eval_u_inner(u, strict)? * osc_factor(u.ln(), *amplitude, *period)),
            WeightKind::Tabulated(t) => t.eval_u(u, strict),
            WeightKind::Derived { base, transform } => match *transform {
                DerivedKind::TailQuotientShift { beta } => {
                    Ok(base.tail_u(u)?.value * u.powf(beta - 1.0))
                }
                DerivedKind::PowerShift { beta } => {
                    Ok(base.eval_u_inner(u, strict)? * u.powf(beta))
                }
                DerivedKind::DualW { p } => {
                    let t = base.tail_u(u)?.value;
                    let w = base.eval_u_inner(u, strict)?;
                    let ip = 1.0 / p;
                    Ok((ip - 1.0) * t.powf(ip) * u.powf(ip - 2.0)
                        + w * ip * t.powf(ip - 1.0) * u.powf(ip - 1.0))
                }
                DerivedKind::TailProduct => {
                    Ok(base.eval_u_inner(u, strict)? * base.tail_u(u)?.value)
                }
                DerivedKind::HConvolve { p } => base.hconv_u(u, p, &self.inner.settings),
            },
        }
    }

    /// ln ω(1-u) given ln u. Works arbitrarily deep for structurally
    /// supported kinds; falls back to linear evaluation when representable.
    pub fn log_eval_u(&self, ln_u: f64) -> Option<f64> {
        match &self.inner.kind {
            WeightKind::Standard { alpha, normalized } => {
                if *normalized {
                    let two_minus_u = 2.0 - ln_u.exp(); // exp underflows to 0 harmlessly
                    Some((alpha + 1.0).ln() + alpha * (ln_u + two_minus_u.ln()))
                } else {
                    Some(alpha * ln_u)
                }
            }
            WeightKind::Exponential { c, gamma } => Some(-c * (-gamma * ln_u).exp()),
            WeightKind::LogPower { a, b } => Some(a * ln_u + b * (1.0 - ln_u).ln()),
            WeightKind::Oscillating {
                base,
                amplitude,
                period,
            } => {
                let f = osc_factor(ln_u, *amplitude, *period);
                Some(base.log_eval_u(ln_u)? + f.ln())
            }
            WeightKind::Tabulated(t) => Some(t.log_eval(ln_u)),
            WeightKind::Derived { base, transform } => match *transform {
                DerivedKind::TailQuotientShift { beta } => {
                    Some(base.log_tail_u(ln_u)? + (beta - 1.0) * ln_u)
                }
                DerivedKind::PowerShift { beta } => Some(base.log_eval_u(ln_u)? + beta * ln_u),
                DerivedKind::DualW { p } => {
                    let lt = base.log_tail_u(ln_u)?;
                    let lw = base.log_eval_u(ln_u)?;
                    let ip = 1.0 / p;
                    let t1 = (ip - 1.0).ln() + ip * lt + (ip - 2.0) * ln_u;
                    let t2 = lw - p.ln() + (ip - 1.0) * (lt + ln_u);
                    Some(quad::logaddexp(t1, t2))
                }
                DerivedKind::TailProduct => Some(base.log_eval_u(ln_u)? + base.log_tail_u(ln_u)?),
                DerivedKind::HConvolve { .. } => {
                    // no structural log form; linear fallback
                    if ln_u > -650.0 {
                        self.eval_u(ln_u.exp()).ok().and_then(|v| {
                            if v > 0.0 {
                                Some(v.ln())
                            } else {
                                None
                            }
                        })
                    } else {
                        None
                    }
                }
            },
        }
    }

    // ------------------------------------------------------------------
    // tails
    // ------------------------------------------------------------------

    /// ω̂(r) = ∫_r^1 ω, with an error estimate.
    pub fn tail(&self, r: f64) -> Result<Qty> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("tail requires r in [0,1), got {r}")));
        }
        self.tail_u(1.0 - r)
    }

    /// ω̂(1-u) = ∫_0^u ω(1-v) dv.
    pub fn tail_u(&self, u: f64) -> Result<Qty> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::Domain(format!(
                "tail_u requires u in (0,1], got {u}"
            )));
        }
        if let Some((c, s)) = self.power_law() {
            return Ok(Qty::exact(c * u.powf(s + 1.0) / (s + 1.0)));
        }
        if let WeightKind::LogPower { a, b } = self.inner.kind {
            if a == -1.0 && b < -1.0 {
                let t = 1.0 - u.ln();
                return Ok(Qty::exact(t.powf(b + 1.0) / (-b - 1.0)));
            }
        }
        if let WeightKind::Derived {
            base,
            transform: DerivedKind::DualW { p },
        } = &self.inner.kind
        {
            // Ŵ = ω̂^{1/p} (1-r)^{1/p-1}, exact antiderivative of W.
            let bt = base.tail_u(u)?;
            let ip = 1.0 / *p;
            let value = bt.value.powf(ip) * u.powf(ip - 1.0);
            let err = if bt.value > 0.0 {
                value * ip * bt.err / bt.value
            } else {
                0.0
            };
            return Ok(Qty { value, err });
        }

        let key = u.to_bits();
        if let Some(q) = self.inner.tails.read().unwrap().get(&key) {
            return Ok(*q);
        }
        // tighter budget than advertised so the cached figure honours the
        // declared tolerance with margin
        let s = QuadSettings {
            abs_tol: self.inner.settings.abs_tol * 1e-2,
            rel_tol: self.inner.settings.rel_tol * 1e-2,
            ..self.inner.settings
        };
        let me = self.clone();
        let q = quad::integrate_to_zero(&|v| me.eval_u_cont(v).unwrap_or(f64::NAN), u, &s)?;
        if !q.value.is_finite() {
            return Err(Error::Domain(format!(
                "tail quadrature produced non-finite value for {}",
                self.spec()
            )));
        }
        self.inner.tails.write().unwrap().insert(key, q);
        Ok(q)
    }

    /// ln ω̂(1-u) given ln u; None when no sufficiently deep form exists.
    pub fn log_tail_u(&self, ln_u: f64) -> Option<f64> {
        if let Some((c, s)) = self.power_law() {
            return Some(c.ln() + (s + 1.0) * ln_u - (s + 1.0).ln());
        }
        if let WeightKind::LogPower { a, b } = self.inner.kind {
            if a == -1.0 && b < -1.0 {
                return Some((b + 1.0) * (1.0 - ln_u).ln() - (-b - 1.0).ln());
            }
        }
        if let WeightKind::Derived {
            base,
            transform: DerivedKind::DualW { p },
        } = &self.inner.kind
        {
            let ip = 1.0 / *p;
            return Some(ip * base.log_tail_u(ln_u)? + (ip - 1.0) * ln_u);
        }
        if ln_u > -650.0 {
            if let Ok(q) = self.tail_u(ln_u.exp()) {
                if q.value > 1e-280 {
                    return Some(q.value.ln());
                }
            }
        }
        self.log_tail_quad(ln_u)
    }

    /// Log-space strip quadrature of the tail, for weights whose linear tail
    /// underflows (e.g. exponential decay). Needs a structural log form.
    fn log_tail_quad(&self, ln_u: f64) -> Option<f64> {
        let le_edge = self.log_eval_u(ln_u)?;
        let le_back = self.log_eval_u(ln_u - 8.0)?;
        if !le_edge.is_finite() || !le_back.is_finite() {
            return None;
        }
        // averaged slope of ln ω(1-u) in ln u near the edge (the 8-wide
        // baseline smooths oscillating factors) sets how far down the
        // integral still contributes
        let slope = (le_edge - le_back) / 8.0;
        let span = (90.0 / (slope + 1.0).max(0.05)).clamp(10.0, 1800.0);
        let strips = (2.0 * span).ceil() as usize;
        let h = span / strips as f64;
        let mut acc = LogSum::new();
        for k in 0..strips {
            let a = ln_u - span + k as f64 * h;
            for i in 0..16 {
                let t = a + 0.5 * h * (GL16_X[i] + 1.0);
                let le = self.log_eval_u(t)?;
                acc.add(le + t + (0.5 * h * GL16_W[i]).ln());
            }
        }
        Some(acc.total())
    }

    /// Whether deep (log-space) tail scans are available.
    pub fn has_deep_tail(&self) -> bool {
        if self.power_law().is_some() {
            return true;
        }
        match &self.inner.kind {
            WeightKind::LogPower { a, b } => *a == -1.0 && *b < -1.0,
            WeightKind::Derived {
                base,
                transform: DerivedKind::DualW { .. },
            } => base.has_deep_tail(),
            _ => false,
        }
    }

    /// Ladder depth (octaves in 1-r) tail-based scans may use.
    pub fn tail_scan_octaves(&self) -> u32 {
        if self.has_deep_tail() {
            900
        } else if self
            .log_tail_quad(-25.0 * std::f64::consts::LN_2)
            .map_or(false, |v| v.is_finite())
        {
            380
        } else {
            20
        }
    }

    // ------------------------------------------------------------------
    // moments
    // ------------------------------------------------------------------

    /// ω_x = ∫_0^1 r^x ω(r) dr, cached.
    pub fn moment(&self, x: f64) -> Result<Qty> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("moment requires x >= 0, got {x}")));
        }
        if let Some(q) = self.closed_moment(x) {
            return Ok(q);
        }
        let key = x.to_bits();
        if let Some(q) = self.inner.moments.read().unwrap().get(&key) {
            return Ok(*q);
        }
        let q = self.moment_quad(x)?;
        self.inner.moments.write().unwrap().insert(key, q);
        Ok(q)
    }

    fn closed_moment(&self, x: f64) -> Option<Qty> {
        if let Some((c, s)) = self.power_law() {
            return Some(Qty::exact(c * (lbeta(x + 1.0, s + 1.0)).exp()));
        }
        if let WeightKind::Standard {
            alpha,
            normalized: true,
        } = self.inner.kind
        {
            let v = (alpha + 1.0) / 2.0 * lbeta((x + 1.0) / 2.0, alpha + 1.0).exp();
            return Some(Qty::exact(v));
        }
        None
    }

    fn moment_quad(&self, x: f64) -> Result<Qty> {
        let s = QuadSettings {
            abs_tol: self.inner.settings.abs_tol * 1e-2,
            rel_tol: self.inner.settings.rel_tol * 1e-2,
            ..self.inner.settings
        };
        let me = self.clone();
        // Weights with slowly decaying mass (log-type) keep contributing
        // below any representable u; cut the ladder at eps where
        // (1-u)^x = 1 + O(x eps) and add the analytic tail ω̂(eps).
        if x <= 1e4 {
            let eps = (1e-12 / (x + 1.0)).min(1e-12).max(1e-280);
            let (mut q, cutoff) = quad::integrate_down(
                &|u: f64| (x * (-u).ln_1p()).exp() * me.eval_u_cont(u).unwrap_or(f64::NAN),
                1.0,
                eps,
                &s,
            )?;
            if let Some(c) = cutoff {
                let tail = self.tail_u(c)?;
                q.value += tail.value;
                q.err += tail.err + x * c * tail.value;
            }
            Ok(q)
        } else {
            // substitute u = t/x: the integrand concentrates near r = 1
            let tmax = 745.0;
            let eps = 1e-12f64;
            let (mut q, cutoff) = quad::integrate_down(
                &|t: f64| {
                    let lr = x * (-t / x).ln_1p();
                    lr.exp() * me.eval_u_cont(t / x).unwrap_or(f64::NAN)
                },
                tmax,
                eps,
                &s,
            )?;
            q.value /= x;
            q.err = q.err / x + 1e-300;
            if let Some(c) = cutoff {
                // ∫_0^{c} e^{-t} ω(1-t/x) dt / x = ω̂(c/x) up to O(c)
                let tail = self.tail_u(c / x)?;
                q.value += tail.value;
                q.err += tail.err + c * tail.value;
            }
            Ok(q)
        }
    }

    /// ln ω_x, usable at x far beyond linear-space range for weights with a
    /// closed moment or a structural log form.
    pub fn log_moment(&self, x: f64) -> Result<f64> {
        if let Some((c, s)) = self.power_law() {
            return Ok(c.ln() + lbeta(x + 1.0, s + 1.0));
        }
        if let WeightKind::Standard {
            alpha,
            normalized: true,
        } = self.inner.kind
        {
            return Ok(((alpha + 1.0) / 2.0).ln() + lbeta((x + 1.0) / 2.0, alpha + 1.0));
        }
        if x <= 1e4 {
            let q = self.moment(x)?;
            if q.value > 0.0 {
                return Ok(q.value.ln());
            }
            return Err(Error::Domain(format!(
                "moment of {} is not positive",
                self.spec()
            )));
        }
        // log-space Laplace form: ω_x = (1/x) ∫ exp(x ln(1-t/x)) ω(1-t/x) dt
        let ln_x = x.ln();
        let slope = self.endpoint_slope().ok_or_else(|| {
            Error::Unsupported(format!(
                "weight {} has no deep moment form at x = {x:.3e}",
                self.spec()
            ))
        })?;
        let ln_t_min = (-45.0 / (slope + 1.0).max(0.05)).min(-8.0).max(-600.0);
        let ln_t_max = 745f64.ln();
        let strips = ((ln_t_max - ln_t_min).ceil() as usize).max(8);
        let h = (ln_t_max - ln_t_min) / strips as f64;
        let mut acc = LogSum::new();
        for k in 0..strips {
            let a = ln_t_min + k as f64 * h;
            for i in 0..16 {
                let lt = a + 0.5 * h * (GL16_X[i] + 1.0);
                let t = lt.exp();
                let ratio = t / x;
                let lr = if ratio < 1e-290 {
                    -t
                } else {
                    x * (-ratio).ln_1p()
                };
                let le = self.log_eval_u(lt - ln_x).ok_or_else(|| {
                    Error::Unsupported(format!("no log form for {}", self.spec()))
                })?;
                acc.add(lr + le + lt + (0.5 * h * GL16_W[i]).ln());
            }
        }
        Ok(acc.total() - ln_x)
    }

    /// Slope of ln ω(1-u) against ln u at the deep end (power-law exponent).
    fn endpoint_slope(&self) -> Option<f64> {
        if let Some((_, s)) = self.power_law() {
            return Some(s);
        }
        let a = self.log_eval_u(-30.0)?;
        let b = self.log_eval_u(-34.0)?;
        if a.is_finite() && b.is_finite() {
            Some((a - b) / 4.0)
        } else {
            None
        }
    }

    /// Ladder depth (octaves in k) moment-based series scans may use. Weights
    /// with closed moments go deep; a structural log form buys a modest
    /// extension (each moment there costs a Laplace quadrature); everything
    /// else is capped like any quadrature-backed scan.
    pub fn moment_scan_octaves(&self) -> u32 {
        if self.power_law().is_some()
            || matches!(
                self.inner.kind,
                WeightKind::Standard {
                    normalized: true,
                    ..
                }
            )
        {
            900
        } else if self.endpoint_slope().is_some() && self.log_eval_u(-200.0).is_some() {
            48
        } else {
            20
        }
    }

    /// ω̂(0) = ω_0, the total mass.
    pub fn mass(&self) -> f64 {
        self.mass_qty().map(|q| q.value).unwrap_or(f64::NAN)
    }

    fn mass_qty(&self) -> Result<Qty> {
        if let Some(q) = self.inner.mass.get() {
            return Ok(*q);
        }
        let q = self.tail_u(1.0)?;
        let _ = self.inner.mass.set(q);
        Ok(q)
    }

    /// ω(1-u) = c·u^s exactly, when the weight is a pure power law.
    pub fn power_law(&self) -> Option<(f64, f64)> {
        match &self.inner.kind {
            WeightKind::Standard { alpha, normalized } => {
                if !*normalized {
                    Some((1.0, *alpha))
                } else if *alpha == 0.0 {
                    Some((1.0, 0.0))
                } else {
                    None
                }
            }
            WeightKind::LogPower { a, b } if *b == 0.0 => Some((1.0, *a)),
            WeightKind::Derived { base, transform } => {
                let (c, s) = base.power_law()?;
                match *transform {
                    DerivedKind::TailQuotientShift { beta } => Some((c / (s + 1.0), s + beta)),
                    DerivedKind::PowerShift { beta } => Some((c, s + beta)),
                    DerivedKind::TailProduct => Some((c * c / (s + 1.0), 2.0 * s + 1.0)),
                    DerivedKind::DualW { p } => {
                        let ip = 1.0 / p;
                        Some((
                            (c / (s + 1.0)).powf(ip) * ((s + 2.0) * ip - 1.0),
                            (s + 2.0) * ip - 2.0,
                        ))
                    }
                    DerivedKind::HConvolve { p } => Some((c * (lbeta(p, s + 1.0)).exp(), s + p)),
                }
            }
            _ => None,
        }
    }

    fn hconv_u(&self, u: f64, p: f64, s: &QuadSettings) -> Result<f64> {
        // h(u) = ∫_0^u (u-v)^{p-1} ω(1-v) dv, split at u/2 to isolate both
        // possible singular ends
        let me = self.clone();
        let lower = quad::integrate_to_zero(
            &|v: f64| (u - v).powf(p - 1.0) * me.eval_u_cont(v).unwrap_or(f64::NAN),
            u / 2.0,
            s,
        )?;
        let upper = quad::integrate_to_zero(
            &|w: f64| w.powf(p - 1.0) * me.eval_u_cont(u - w).unwrap_or(f64::NAN),
            u / 2.0,
            s,
        )?;
        Ok(lower.value + upper.value)
    }

    // ------------------------------------------------------------------
    // cache persistence
    // ------------------------------------------------------------------

    pub fn cache_snapshot(&self) -> CacheSnapshot {
        let mut moments: Vec<(u64, f64, f64)> = self
            .inner
            .moments
            .read()
            .unwrap()
            .iter()
            .map(|(k, q)| (*k, q.value, q.err))
            .collect();
        moments.sort_unstable_by_key(|e| e.0);
        let mut tails: Vec<(u64, f64, f64)> = self
            .inner
            .tails
            .read()
            .unwrap()
            .iter()
            .map(|(k, q)| (*k, q.value, q.err))
            .collect();
        tails.sort_unstable_by_key(|e| e.0);
        CacheSnapshot {
            spec: self.spec().to_string(),
            spec_hash: self.spec_hash(),
            moments,
            tails,
        }
    }

    pub fn cache_restore(&self, snap: &CacheSnapshot) {
        if snap.spec_hash != self.spec_hash() {
            return;
        }
        let mut m = self.inner.moments.write().unwrap();
        for (k, v, e) in &snap.moments {
            m.insert(*k, Qty { value: *v, err: *e });
        }
        drop(m);
        let mut t = self.inner.tails.write().unwrap();
        for (k, v, e) in &snap.tails {
            t.insert(*k, Qty { value: *v, err: *e });
        }
    }
}

/// Serializable moment/tail cache, keyed by the weight-spec hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheSnapshot {
    pub spec: String,
    pub spec_hash: u64,
    pub moments: Vec<(u64, f64, f64)>,
    pub tails: Vec<(u64, f64, f64)>,
}

fn osc_factor(ln_u: f64, amplitude: f64, period: f64) -> f64 {
    let phase = -ln_u / std::f64::consts::LN_2 / period;
    (1.0 + amplitude * (2.0 * std::f64::consts::PI * phase).sin()).max(0.0)
}

fn validate(kind: &WeightKind) -> Result<()> {
    match kind {
        WeightKind::Standard { alpha, .. } => {
            if !(*alpha > -1.0) {
                return Err(Error::InvalidWeight(format!(
                    "standard weight needs alpha > -1 for an integrable tail, got {alpha}"
                )));
            }
        }
        WeightKind::Exponential { c, gamma } => {
            if !(*c > 0.0 && *gamma > 0.0) {
                return Err(Error::InvalidWeight(format!(
                    "exponential weight needs c > 0 and gamma > 0, got c={c}, gamma={gamma}"
                )));
            }
        }
        WeightKind::LogPower { a, b } => {
            let ok = *a > -1.0 || (*a == -1.0 && *b < -1.0);
            if !ok {
                return Err(Error::InvalidWeight(format!(
                    "logpow weight with a={a}, b={b} is not integrable near r=1"
                )));
            }
        }
        WeightKind::Oscillating {
            amplitude, period, ..
        } => {
            if !(*period > 0.0) || !amplitude.is_finite() {
                return Err(Error::InvalidWeight(
                    "oscillating weight needs a positive period and finite amplitude".into(),
                ));
            }
            // zero plateaus are fine as long as the tail stays positive:
            // every period-long window must contain a positive point
            let n = 1 << 14;
            let chunk = (n as f64 / (40.0 / period).max(1.0)) as usize;
            let chunk = chunk.clamp(4, n);
            let mut any_positive_in_chunk = false;
            for i in 0..n {
                let ln_u = -(i as f64) * 40.0 * std::f64::consts::LN_2 / n as f64;
                if osc_factor(ln_u, *amplitude, *period) > 0.0 {
                    any_positive_in_chunk = true;
                }
                if (i + 1) % chunk == 0 {
                    if !any_positive_in_chunk {
                        return Err(Error::InvalidWeight(
                            "oscillating weight vanishes on a full period; tail would not stay positive".into(),
                        ));
                    }
                    any_positive_in_chunk = false;
                }
            }
        }
        WeightKind::Tabulated(t) => {
            if t.u.len() < 2 {
                return Err(Error::InvalidWeight(
                    "tabulated weight needs at least two nodes".into(),
                ));
            }
            if t.cont_deep.1 <= -1.0 {
                return Err(Error::InvalidWeight(format!(
                    "tabulated continuation exponent {} is not integrable",
                    t.cont_deep.1
                )));
            }
        }
        WeightKind::Derived { transform, .. } => match transform {
            DerivedKind::DualW { p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::InvalidWeight(format!(
                        "dual weight W_p requires p in (0,1), got {p}"
                    )));
                }
            }
            DerivedKind::HConvolve { p } => {
                if !(*p > 0.0) {
                    return Err(Error::InvalidWeight(format!(
                        "h_omega requires p > 0, got {p}"
                    )));
                }
            }
            _ => {}
        },
    }
    Ok(())
}

impl Tabulated {
    /// Build from (r, value) samples; values must be positive.
    pub fn from_samples(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        samples.retain(|s| s.0 >= 0.0 && s.0 < 1.0);
        if samples.len() < 2 {
            return Err(Error::InvalidWeight(
                "tabulated weight needs at least two nodes in [0,1)".into(),
            ));
        }
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in samples.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidWeight(
                    "tabulated nodes must be strictly increasing".into(),
                ));
            }
        }
        if samples.iter().any(|s| !(s.1 > 0.0)) {
            return Err(Error::InvalidWeight(
                "tabulated values must be positive for log-linear interpolation".into(),
            ));
        }
        // ascending u
        let mut u: Vec<f64> = samples.iter().rev().map(|s| 1.0 - s.0).collect();
        let mut v: Vec<f64> = samples.iter().rev().map(|s| s.1).collect();
        // deduplicate identical u after the 1-r map (paranoia for r ~ 1)
        let mut i = 1;
        while i < u.len() {
            if u[i] == u[i - 1] {
                u.remove(i);
                v.remove(i);
            } else {
                i += 1;
            }
        }
        let ln_u: Vec<f64> = u.iter().map(|x| x.ln()).collect();
        let ln_v: Vec<f64> = v.iter().map(|x| x.ln()).collect();
        let slope_deep = (ln_v[1] - ln_v[0]) / (ln_u[1] - ln_u[0]);
        let c_deep = (ln_v[0] - slope_deep * ln_u[0]).exp();
        let n = u.len();
        let slope_sh = (ln_v[n - 1] - ln_v[n - 2]) / (ln_u[n - 1] - ln_u[n - 2]);
        let c_sh = (ln_v[n - 1] - slope_sh * ln_u[n - 1]).exp();
        Ok(Tabulated {
            u,
            ln_u,
            ln_v,
            cont_deep: (c_deep, slope_deep),
            cont_shallow: (c_sh, slope_sh),
        })
    }

    fn eval_u(&self, u: f64, strict: bool) -> Result<f64> {
        let n = self.u.len();
        if u < self.u[0] || u > self.u[n - 1] {
            if strict {
                return Err(Error::InterpolationRange {
                    r: 1.0 - u,
                    lo: 1.0 - self.u[n - 1],
                    hi: 1.0 - self.u[0],
                });
            }
            let (c, s) = if u < self.u[0] {
                self.cont_deep
            } else {
                self.cont_shallow
            };
            return Ok(c * u.powf(s));
        }
        Ok(self.log_eval(u.ln()).exp())
    }

    fn log_eval(&self, ln_u: f64) -> f64 {
        let n = self.u.len();
        if ln_u <= self.ln_u[0] {
            let (c, s) = self.cont_deep;
            return c.ln() + s * ln_u;
        }
        if ln_u >= self.ln_u[n - 1] {
            let (c, s) = self.cont_shallow;
            return c.ln() + s * ln_u;
        }
        let i = match self
            .ln_u
            .binary_search_by(|x| x.partial_cmp(&ln_u).unwrap())
        {
            Ok(i) => return self.ln_v[i.min(n - 1)],
            Err(i) => i,
        };
        let t = (ln_u - self.ln_u[i - 1]) / (self.ln_u[i] - self.ln_u[i - 1]);
        self.ln_v[i - 1] + t * (self.ln_v[i] - self.ln_v[i - 1])
    }
}

/// Gamma-function helper re-export for closed monomial identities in tests.
pub fn beta_fn(a: f64, b: f64) -> f64 {
    (lgamma(a) + lgamma(b) - lgamma(a + b)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_eval_forms() {
        let w = RadialWeight::standard(0.0, false).unwrap();
        assert_eq!(w.eval(0.5).unwrap(), 1.0);
        let w = RadialWeight::standard(2.0, true).unwrap();
        let r: f64 = 0.3;
        let expect = 3.0 * (1.0 - r * r).powi(2);
        assert!((w.eval(r).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn dual_w_of_constant_is_closed_form() {
        let base = RadialWeight::constant();
        let w = RadialWeight::derived(base, DerivedKind::DualW { p: 0.5 }).unwrap();
        for r in [0.0, 0.25, 0.5, 0.9] {
            let u = 1.0 - r;
            assert!((w.eval(r).unwrap() - 3.0 * u * u).abs() < 1e-12, "r={r}");
        }
        // tail identity (1-r)^3
        let t = w.tail(0.5).unwrap();
        assert!((t.value - 0.125).abs() < 1e-10);
    }

    #[test]
    fn tail_product_of_constant() {
        let w = RadialWeight::derived(RadialWeight::constant(), DerivedKind::TailProduct).unwrap();
        assert!((w.eval(0.5).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tails_closed_forms() {
        let w = RadialWeight::constant();
        assert!((w.tail(0.75).unwrap().value - 0.25).abs() < 1e-14);
        let w = RadialWeight::standard(1.0, false).unwrap();
        let r: f64 = 0.4;
        assert!((w.tail(r).unwrap().value - (1.0 - r).powi(2) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn moments_closed_and_quadrature() {
        let w = RadialWeight::constant();
        assert!((w.moment(3.0).unwrap().value - 0.25).abs() < 1e-14);
        // quadrature path for the normalized standard weight
        let w = RadialWeight::standard(2.0, false).unwrap();
        let m = w.moment(1.0).unwrap();
        assert!((m.value - 1.0 / 12.0).abs() < 1e-12, "{}", m.value);
        // moment(0) = tail(0)
        let osc = RadialWeight::new(WeightKind::Oscillating {
            base: RadialWeight::standard(1.0, false).unwrap(),
            amplitude: 0.5,
            period: 2.0,
        })
        .unwrap();
        let m0 = osc.moment(0.0).unwrap();
        let t0 = osc.tail(0.0).unwrap();
        assert!((m0.value - t0.value).abs() < 1e-9 * t0.value);
    }

    #[test]
    fn moment_large_x_substitution_matches_closed_form() {
        // exercise the substitution path on a weight with no closed moment
        let osc = RadialWeight::new(WeightKind::Oscillating {
            base: RadialWeight::constant(),
            amplitude: 0.0,
            period: 2.0,
        })
        .unwrap();
        // amplitude 0 makes it the constant weight: ω_x = 1/(x+1)
        let x = 2e4;
        let m = osc.moment(x).unwrap();
        assert!((m.value - 1.0 / (x + 1.0)).abs() < 1e-10 / x, "{}", m.value);
    }

    #[test]
    fn log_moment_matches_closed_form_deep() {
        let w = RadialWeight::standard(1.5, false).unwrap();
        for &x in &[10.0, 1e4, 1e8, 1e30] {
            let lm = w.log_moment(x).unwrap();
            let closed = lbeta(x + 1.0, 2.5);
            assert!((lm - closed).abs() < 1e-9 * (1.0 + closed.abs()), "x={x}");
        }
    }

    #[test]
    fn log_moment_laplace_path() {
        // normalized standard weight at alpha=1: closed via lbeta; compare
        // against the generic Laplace path through an oscillating wrapper
        let osc = RadialWeight::new(WeightKind::Oscillating {
            base: RadialWeight::standard(1.0, false).unwrap(),
            amplitude: 0.0,
            period: 2.0,
        })
        .unwrap();
        let x = 1e8;
        let lm = osc.log_moment(x).unwrap();
        let closed = lbeta(x + 1.0, 2.0);
        assert!(
            (lm - closed).abs() < 1e-5 * closed.abs(),
            "{lm} vs {closed}"
        );
    }

    #[test]
    fn non_integrable_weights_rejected() {
        assert!(RadialWeight::standard(-1.0, false).is_err());
        assert!(RadialWeight::new(WeightKind::LogPower { a: -1.0, b: -0.5 }).is_err());
        assert!(RadialWeight::new(WeightKind::LogPower { a: -1.2, b: 0.0 }).is_err());
    }

    #[test]
    fn logpow_closed_tail() {
        let w = RadialWeight::new(WeightKind::LogPower { a: -1.0, b: -2.0 }).unwrap();
        let r: f64 = 0.9;
        let expect = 1.0 / (1.0 - (1.0 - r).ln());
        assert!((w.tail(r).unwrap().value - expect).abs() < 1e-12);
        assert!(w.has_deep_tail());
    }

    #[test]
    fn tabulated_interpolation_and_hull_error() {
        let samples: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let r = i as f64 / 20.0;
                (r, (1.0 - r) as f64)
            })
            .collect();
        let t = Tabulated::from_samples(samples).unwrap();
        let w = RadialWeight::new(WeightKind::Tabulated(t)).unwrap();
        // inside hull: reproduces the power law exactly (log-linear in 1-r)
        assert!((w.eval(0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!((w.eval(0.475).unwrap() - 0.525).abs() < 1e-12);
        // outside hull
        assert!(matches!(
            w.eval(0.99),
            Err(Error::InterpolationRange { .. })
        ));
    }

    #[test]
    fn power_law_propagation() {
        let base = RadialWeight::standard(1.0, false).unwrap();
        let w = RadialWeight::derived(base.clone(), DerivedKind::TailQuotientShift { beta: 0.75 })
            .unwrap();
        // ω̂ = u^2/2, times u^{β-1}: c = 1/2, s = 1.75
        let (c, s) = w.power_law().unwrap();
        assert!((c - 0.5).abs() < 1e-15 && (s - 1.75).abs() < 1e-15);
        let h = RadialWeight::derived(base, DerivedKind::HConvolve { p: 2.0 }).unwrap();
        let (c, s) = h.power_law().unwrap();
        // B(2,2) = 1/6
        assert!((c - 1.0 / 6.0).abs() < 1e-14 && (s - 3.0).abs() < 1e-15);
    }

    #[test]
    fn hconvolve_quadrature_matches_power_law() {
        // oscillating wrapper with zero amplitude defeats the closed path
        let base = RadialWeight::new(WeightKind::Oscillating {
            base: RadialWeight::standard(1.0, false).unwrap(),
            amplitude: 0.0,
            period: 2.0,
        })
        .unwrap();
        let h = RadialWeight::derived(base, DerivedKind::HConvolve { p: 0.5 }).unwrap();
        let u: f64 = 0.3;
        // closed: B(1/2, 2) u^{3/2}
        let expect = beta_fn(0.5, 2.0) * u.powf(1.5);
        assert!((h.eval_u(u).unwrap() - expect).abs() < 1e-8 * expect);
    }

    #[test]
    fn cache_snapshot_roundtrip() {
        let w = RadialWeight::new(WeightKind::Oscillating {
            base: RadialWeight::constant(),
            amplitude: 0.5,
            period: 2.0,
        })
        .unwrap();
        let _ = w.moment(7.0).unwrap();
        let _ = w.tail(0.5).unwrap();
        let snap = w.cache_snapshot();
        assert_eq!(snap.moments.len(), 1);
        let w2 = RadialWeight::new(WeightKind::Oscillating {
            base: RadialWeight::constant(),
            amplitude: 0.5,
            period: 2.0,
        })
        .unwrap();
        w2.cache_restore(&snap);
        assert_eq!(w2.moment(7.0).unwrap(), w.moment(7.0).unwrap());
    }
}

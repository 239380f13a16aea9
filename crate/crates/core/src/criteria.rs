//! Triviality, boundedness, and compactness criteria with graded verdicts.
//!
//! Every divergence decision runs through the depth-doubling trichotomy in
//! [`crate::trend`]; series and improper integrals are evaluated in log space
//! so scans can run hundreds of octaves deep where closed tail/moment forms
//! exist. Weights whose upper-doubling membership fails are reported
//! `Unsupported`; an inconclusive membership only adds a warning.

use serde::Serialize;

use crate::classify::{self, GridSpec};
use crate::error::{Error, Result};
use crate::poly::CoefficientSeries;
use crate::quad::LogSum;
use crate::quad::{GL16_W, GL16_X};
use crate::report::{CriterionReport, RatioPair, RatioSweep, Sample, Verdict};
use crate::trend::{self, Limsup, Trend};
use crate::weight::{DerivedKind, RadialWeight};

const LN2: f64 = std::f64::consts::LN_2;
/// ladder nodes per octave in sup scans
const SUP_Q: u32 = 2;
/// exact summation range before block acceleration takes over
const EXACT_CLOSED: usize = 4096;
const EXACT_QUAD: usize = 256;

// ---------------------------------------------------------------------------
// log-space evaluators
// ---------------------------------------------------------------------------

/// ln ω̂ as a function of ln u; quadrature-backed tails are sampled lazily on
/// a 16-node-per-octave grid and interpolated, so repeated queries (series
/// terms at u = 1/k) stay cheap.
pub(crate) struct TailEval {
    w: RadialWeight,
    closed: bool,
    max_idx: usize,
    /// table values at ln u = -i/npo · ln 2, grown on demand
    table: std::cell::RefCell<Vec<f64>>,
    npo: usize,
}

impl TailEval {
    pub(crate) fn new(w: &RadialWeight, need_octaves: u32) -> Result<Self> {
        let closed = w.has_deep_tail();
        let npo = 16usize;
        let te = TailEval {
            w: w.clone(),
            closed,
            max_idx: npo * need_octaves as usize + 1,
            table: std::cell::RefCell::new(Vec::new()),
            npo,
        };
        if !closed {
            // probe once so unsupported weights fail fast
            te.ensure(1)?;
        }
        Ok(te)
    }

    fn ensure(&self, idx: usize) -> Result<()> {
        let mut table = self.table.borrow_mut();
        while table.len() <= idx.min(self.max_idx) {
            let i = table.len();
            let ln_u = -(i as f64) / self.npo as f64 * LN2;
            let v = self.w.log_tail_u(ln_u).ok_or_else(|| {
                Error::Unsupported(format!(
                    "tail of {} not evaluable at depth {:.1} octaves",
                    self.w.spec(),
                    i as f64 / self.npo as f64
                ))
            })?;
            table.push(v);
        }
        Ok(())
    }

    pub(crate) fn log_tail(&self, ln_u: f64) -> f64 {
        if self.closed {
            return self.w.log_tail_u(ln_u).unwrap_or(f64::NEG_INFINITY);
        }
        let x = (-ln_u / LN2 * self.npo as f64).max(0.0);
        let i = x.floor() as usize;
        let _ = self.ensure(i + 1);
        let table = self.table.borrow();
        let n = table.len();
        if i + 1 >= n {
            // linear extrapolation from the last segment
            let slope = table[n - 1] - table[n - 2];
            return table[n - 1] + slope * (x - (n - 1) as f64);
        }
        let t = x - i as f64;
        table[i] * (1.0 - t) + table[i + 1] * t
    }
}

/// Σ_n ĝ(n+1)(n+1)/(n+k+1) for a real index k >= 0.
pub fn symbol_sum(g: &CoefficientSeries, k: f64) -> f64 {
    let mut acc = 0.0;
    for n in 1..g.len() {
        let c = g.coeff(n).re;
        if c != 0.0 {
            acc += c * n as f64 / (n as f64 + k);
        }
    }
    acc
}

fn require_nonneg_symbol(g: &CoefficientSeries) -> Result<()> {
    if !g.is_nonneg_real() {
        return Err(Error::Domain(
            "criterion requires a symbol with nonnegative Maclaurin coefficients".into(),
        ));
    }
    Ok(())
}

/// Upper-doubling gate: NonMember ⇒ Unsupported, Inconclusive ⇒ warning.
fn dhat_gate(w: &RadialWeight) -> Result<(bool, Vec<String>)> {
    let grid = GridSpec::default_for(w);
    let m = classify::check_dhat(w, &grid)?;
    match m.verdict {
        crate::report::Membership::Member => Ok((false, Vec::new())),
        crate::report::Membership::NonMember => Ok((
            true,
            vec![format!(
                "weight {} is not upper doubling (class D-hat); the criterion's hypotheses are not met",
                w.spec()
            )],
        )),
        crate::report::Membership::Inconclusive => Ok((
            false,
            vec![format!(
                "upper-doubling membership of {} is inconclusive at the grid depth; criterion hypotheses unverified",
                w.spec()
            )],
        )),
    }
}

// ---------------------------------------------------------------------------
// block-accelerated sums and strip integrals (log space)
// ---------------------------------------------------------------------------

/// Σ_{x=a}^{b-1} f(x) for positive slowly-varying f, as
/// ∫_a^b f + (f(a)-f(b))/2 evaluated in scaled linear space; returns the log.
fn block_log_sum<F: Fn(f64) -> f64>(log_f: &F, a: f64, b: f64) -> f64 {
    let (la, lb) = (a.ln(), b.ln());
    let h = 0.5 * (lb - la);
    let c = 0.5 * (la + lb);
    let fa = log_f(a);
    let fb = log_f(b);
    let mut m = fa.max(fb);
    let mut nodes = [0.0f64; 16];
    for i in 0..16 {
        let lx = c + h * GL16_X[i];
        let v = log_f(lx.exp()) + lx;
        nodes[i] = v;
        m = m.max(v + (GL16_W[i] * h).ln());
    }
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut total = 0.0;
    for i in 0..16 {
        total += GL16_W[i] * h * (nodes[i] - m).exp();
    }
    let corr = 0.5 * ((fa - m).exp() - (fb - m).exp());
    if total + corr > 0.0 {
        total += corr;
    }
    m + total.ln()
}

/// Depth-doubling scan of the partial sums of Σ_{k>=k0} exp(log_term(k)).
/// `exact` holds log terms for k = k0..k0+exact.len(); deeper indices go
/// through one-octave blocks.
fn scan_series_levels<F: Fn(f64) -> f64>(
    log_term: &F,
    exact: &[f64],
    k0: usize,
    max_octaves: u32,
) -> trend::LevelScan {
    let n_exact = exact.len();
    let mut acc = LogSum::new();
    let mut next_exact = 0usize; // count of exact terms already added
    let mut block_hi = (k0 + n_exact) as f64; // blocks cover [block_hi, 2^depth)
    trend::scan_levels(
        |depth| {
            let k_hi = 2f64.powi(depth as i32);
            // exact terms with index < k_hi
            while next_exact < n_exact && (k0 + next_exact) < k_hi as usize {
                acc.add(exact[next_exact]);
                next_exact += 1;
            }
            if next_exact == n_exact {
                while block_hi < k_hi {
                    let b = (block_hi * 2.0).min(k_hi);
                    acc.add(block_log_sum(log_term, block_hi, b));
                    block_hi = b;
                }
            }
            acc.total()
        },
        max_octaves,
    )
}

/// Depth-doubling scan of ∫_{2^-depth}^{1} exp(log_f(ln u)) du.
fn scan_integral_levels<F: Fn(f64) -> f64>(log_f: &F, max_octaves: u32) -> trend::LevelScan {
    let strips_per_octave = 2usize;
    let mut acc = LogSum::new();
    let mut strip = 0usize;
    trend::scan_levels(
        |depth| {
            let want = depth as usize * strips_per_octave;
            while strip < want {
                let hi = -(strip as f64) / strips_per_octave as f64 * LN2;
                let lo = -((strip + 1) as f64) / strips_per_octave as f64 * LN2;
                let h = 0.5 * (hi - lo);
                let c = 0.5 * (hi + lo);
                for i in 0..16 {
                    let ln_u = c + h * GL16_X[i];
                    acc.add(log_f(ln_u) + ln_u + (GL16_W[i] * h).ln());
                }
                strip += 1;
            }
            acc.total()
        },
        max_octaves,
    )
}

fn trend_summary(t: &Trend) -> (Option<f64>, Option<f64>) {
    match t {
        Trend::Finite { log_value } => (Some(clamp_exp(*log_value)), None),
        Trend::Divergent { level_slope } => (None, Some(*level_slope / LN2)),
        Trend::Undecided => (None, None),
    }
}

fn clamp_exp(log: f64) -> f64 {
    if log > 690.0 {
        f64::MAX
    } else {
        log.exp()
    }
}

fn thin_samples(samples: &[(f64, f64)]) -> Vec<Sample> {
    let stride = (samples.len() / 256).max(1);
    samples
        .iter()
        .step_by(stride)
        .map(|&(u, lv)| Sample {
            at: u,
            value: clamp_exp(lv.min(691.0)),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// triviality criteria, 0 < p <= 1
// ---------------------------------------------------------------------------

/// Triviality of the bounded (and compact) operator class for 0 < p <= 1:
/// samples S(r) = (1-r)^{2-1/p} / ω̂(r)^{1/p}; a sup-divergence trend means
/// only constant symbols act boundedly, a positive limsup means only constant
/// symbols act compactly.
pub fn triviality_p_le_1(
    p: f64,
    w: &RadialWeight,
    octaves: Option<u32>,
) -> Result<CriterionReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!(
            "this criterion needs 0 < p <= 1, got {p}"
        )));
    }
    let mut report = CriterionReport::new("trivial-dirichlet-ple1");
    report.params.p = Some(p);
    report.params.weight = Some(w.spec().to_string());
    let (unsupported, warnings) = dhat_gate(w)?;
    report.warnings = warnings;
    if unsupported {
        report.verdict = Verdict::Unsupported;
        return Ok(report);
    }
    let cap = octaves.unwrap_or(512).min(w.tail_scan_octaves());
    report.params.grid_depth = Some(cap);
    let te = TailEval::new(w, cap + 4)?;
    let ip = 1.0 / p;
    let scan = trend::scan_sup(
        |ln_u| (2.0 - ip) * ln_u - ip * te.log_tail(ln_u),
        SUP_Q,
        cap,
    );
    report.samples = thin_samples(&scan.samples);
    report.verdict = match scan.sup {
        Trend::Divergent { .. } => Verdict::TrivialOnly,
        Trend::Finite { .. } => Verdict::Nontrivial,
        Trend::Undecided => Verdict::Inconclusive,
    };
    report.compact_verdict = Some(match scan.limsup {
        Limsup::Infinite { .. } | Limsup::Positive { .. } => Verdict::TrivialOnly,
        Limsup::Zero => Verdict::Nontrivial,
        Limsup::Undecided => Verdict::Inconclusive,
    });
    if let Trend::Finite { log_value } = scan.sup {
        report.summary.sup_estimate = Some(clamp_exp(log_value));
    } else if let Some(&(_, lv)) = scan.sup_levels.last() {
        report.summary.sup_estimate = Some(clamp_exp(lv));
    }
    if let Limsup::Positive { log_value } = scan.limsup {
        report.summary.limsup_estimate = Some(clamp_exp(log_value));
    } else if let Limsup::Zero = scan.limsup {
        report.summary.limsup_estimate = Some(0.0);
    }
    if let Trend::Divergent { level_slope } = scan.sup {
        report.summary.divergence_slope = Some(level_slope / LN2);
    }
    Ok(report)
}

/// Log of the comparison series Σ_{k>=1} r^{2(k-1)} / (ω̂(1-1/k)^{1/p} k^{2-1/p})
/// at u = 1-r, block-accelerated for deep u.
fn log_series_small_p(te: &TailEval, p: f64, ln_u: f64) -> f64 {
    let u = ln_u.exp();
    let ln_r = (-u).ln_1p();
    let ip = 1.0 / p;
    let log_term = |x: f64| -> f64 {
        // index x >= 1
        let ln_k = x.ln();
        2.0 * (x - 1.0) * ln_r - ip * te.log_tail(-ln_k) - (2.0 - ip) * ln_k
    };
    let mut acc = LogSum::new();
    let n_exact = 1024usize;
    for k in 1..=n_exact {
        acc.add(log_term(k as f64));
    }
    // blocks out to where r^{2k} has decayed away
    let k_end = 45.0 / u.max(1e-300);
    let mut lo = (n_exact + 1) as f64;
    while lo < k_end {
        let hi = (lo * 2.0).min(k_end);
        acc.add(block_log_sum(&log_term, lo, hi));
        lo = hi;
    }
    acc.total()
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesFormReport {
    pub sweep: RatioSweep,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_estimate: Option<f64>,
    pub warnings: Vec<String>,
}

/// The series form of the small-p triviality condition: exact partial sums at
/// each grid r (terms cut off below 1e-14 of the running sum), paired with
/// the closed comparison (1-r)^{1-1/p}/ω̂(r)^{1/p}, plus the sup-trend verdict
/// of the full quantity (1-r)·series.
pub fn series_form_p_le_1(p: f64, w: &RadialWeight, r_grid: &[f64]) -> Result<SeriesFormReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!(
            "this criterion needs 0 < p <= 1, got {p}"
        )));
    }
    let cap = 512.min(w.tail_scan_octaves());
    let te = TailEval::new(w, cap + 24)?;
    let ip = 1.0 / p;
    let mut pairs = Vec::new();
    for &r in r_grid {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("grid point r = {r} outside [0,1)")));
        }
        let mut sum = 0.0f64;
        let mut k = 1usize;
        let r2 = r * r;
        let mut rp = 1.0; // r^{2(k-1)}
        loop {
            let term = rp * (-ip * te.log_tail(-(k as f64).ln())).exp() * (k as f64).powf(ip - 2.0);
            sum += term;
            if k > 8 && term < 1e-14 * sum {
                break;
            }
            if k > 20_000_000 {
                return Err(Error::Tolerance {
                    achieved: term / sum,
                    requested: 1e-14,
                });
            }
            k += 1;
            rp *= r2;
        }
        let u = 1.0 - r;
        let rhs = ((1.0 - ip) * u.ln() - ip * te.log_tail(u.ln())).exp();
        pairs.push(RatioPair {
            at: r,
            lhs: sum,
            rhs,
            ratio: sum / rhs,
        });
    }
    let sweep = RatioSweep::from_pairs(format!("series-vs-closed:p={p}:{}", w.spec()), pairs);

    let scan = trend::scan_sup(|ln_u| ln_u + log_series_small_p(&te, p, ln_u), SUP_Q, cap);
    let verdict = match scan.sup {
        Trend::Divergent { .. } => Verdict::TrivialOnly,
        Trend::Finite { .. } => Verdict::Nontrivial,
        Trend::Undecided => Verdict::Inconclusive,
    };
    let sup_estimate = match scan.sup {
        Trend::Finite { log_value } => Some(clamp_exp(log_value)),
        _ => None,
    };
    Ok(SeriesFormReport {
        sweep,
        verdict,
        sup_estimate,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// triviality criteria, p > 1
// ---------------------------------------------------------------------------

fn pp_of(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!(
            "this criterion needs p > 1, got {p}"
        )));
    }
    Ok(p / (p - 1.0))
}

/// Exact log terms of the series Σ 1/((k+1)^{2+p'} ω_k^{p'-1}).
pub fn triviality_series_terms(p: f64, w: &RadialWeight, k_max: usize) -> Result<Vec<f64>> {
    let pp = pp_of(p)?;
    (0..=k_max)
        .map(|k| {
            let lm = w.log_moment(k as f64)?;
            Ok((-(2.0 + pp) * (k as f64 + 1.0).ln() - (pp - 1.0) * lm).exp())
        })
        .collect()
}

/// Triviality for p > 1: the integral ∫ (1-r)^{p'} ω̂^{1-p'} dr and the series
/// Σ (k+1)^{-(2+p')} ω_k^{1-p'} are scanned independently and their verdicts
/// must not contradict each other.
pub fn triviality_p_gt_1(p: f64, w: &RadialWeight) -> Result<CriterionReport> {
    let pp = pp_of(p)?;
    let mut report = CriterionReport::new("trivial-dirichlet");
    report.params.p = Some(p);
    report.params.weight = Some(w.spec().to_string());
    let (unsupported, warnings) = dhat_gate(w)?;
    report.warnings = warnings;
    if unsupported {
        report.verdict = Verdict::Unsupported;
        return Ok(report);
    }

    let te = TailEval::new(w, w.tail_scan_octaves().min(900) + 4)?;
    let integral = scan_integral_levels(
        &|ln_u| pp * ln_u - (pp - 1.0) * te.log_tail(ln_u),
        w.tail_scan_octaves().min(900),
    );

    let n_exact = if w.power_law().is_some() {
        EXACT_CLOSED
    } else {
        EXACT_QUAD
    };
    let log_term = |x: f64| -> f64 {
        let lm = w.log_moment(x).unwrap_or(f64::NAN);
        -(2.0 + pp) * (x + 1.0).ln() - (pp - 1.0) * lm
    };
    let exact: Vec<f64> = (0..n_exact).map(|k| log_term(k as f64)).collect();
    let series = scan_series_levels(&log_term, &exact, 0, w.moment_scan_octaves().min(900));

    report.samples = integral
        .levels
        .iter()
        .map(|&(d, lv)| Sample {
            at: 2f64.powi(-(d as i32)),
            value: clamp_exp(lv.min(691.0)),
        })
        .collect();

    let vi = trend_to_trivial(&integral.trend);
    let vs = trend_to_trivial(&series.trend);
    let verdict = match (vi, vs) {
        (a, b) if a == b => a,
        (Verdict::Inconclusive, b) => {
            report
                .warnings
                .push("integral form undecided at its depth cap".into());
            b
        }
        (a, Verdict::Inconclusive) => {
            report
                .warnings
                .push("series form undecided at its depth cap".into());
            a
        }
        (a, b) => {
            report.warnings.push(format!(
                "integral and series forms disagree: {a:?} vs {b:?}"
            ));
            Verdict::Inconclusive
        }
    };
    report.verdict = verdict;
    // boundedness and compactness triviality coincide for p > 1
    report.compact_verdict = Some(verdict);
    let (val, slope) = trend_summary(&integral.trend);
    report.summary.value = val;
    report.summary.divergence_slope = slope;
    Ok(report)
}

/// The Bergman-side condition for p > 1: ∫ ω̂(r)^{1-p'} dr = ∞ iff only
/// constant symbols act boundedly on the weighted Bergman space.
pub fn bergman_triviality(p: f64, w: &RadialWeight) -> Result<CriterionReport> {
    let pp = pp_of(p)?;
    let mut report = CriterionReport::new("trivial-bergman");
    report.params.p = Some(p);
    report.params.weight = Some(w.spec().to_string());
    let (unsupported, warnings) = dhat_gate(w)?;
    report.warnings = warnings;
    if unsupported {
        report.verdict = Verdict::Unsupported;
        return Ok(report);
    }
    let te = TailEval::new(w, w.tail_scan_octaves().min(900) + 4)?;
    let integral = scan_integral_levels(
        &|ln_u| -(pp - 1.0) * te.log_tail(ln_u),
        w.tail_scan_octaves().min(900),
    );
    report.samples = integral
        .levels
        .iter()
        .map(|&(d, lv)| Sample {
            at: 2f64.powi(-(d as i32)),
            value: clamp_exp(lv.min(691.0)),
        })
        .collect();
    report.verdict = trend_to_trivial(&integral.trend);
    report.compact_verdict = Some(report.verdict);
    let (val, slope) = trend_summary(&integral.trend);
    report.summary.value = val;
    report.summary.divergence_slope = slope;
    Ok(report)
}

fn trend_to_trivial(t: &Trend) -> Verdict {
    match t {
        Trend::Divergent { .. } => Verdict::TrivialOnly,
        Trend::Finite { .. } => Verdict::Nontrivial,
        Trend::Undecided => Verdict::Inconclusive,
    }
}

// ---------------------------------------------------------------------------
// symbol criteria
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct TgOptions {
    /// truncation for the p = 1 double sums
    pub truncation: usize,
    /// override for sup-scan depth (octaves)
    pub octaves: Option<u32>,
}

impl Default for TgOptions {
    fn default() -> Self {
        TgOptions {
            truncation: 512,
            octaves: None,
        }
    }
}

/// Exact log terms of the p > 1 symbol series
/// Σ (k+1)^{-2} ω_k^{1-p'} (Σ_n (n+1)ĝ(n+1)/(n+k+1))^{p'}.
pub fn tg_series_terms(
    p: f64,
    w: &RadialWeight,
    g: &CoefficientSeries,
    k_max: usize,
) -> Result<Vec<f64>> {
    let pp = pp_of(p)?;
    require_nonneg_symbol(g)?;
    (0..=k_max)
        .map(|k| {
            let lm = w.log_moment(k as f64)?;
            let e = symbol_sum(g, k as f64);
            Ok((-2.0 * (k as f64 + 1.0).ln() - (pp - 1.0) * lm + pp * e.ln()).exp())
        })
        .collect()
}

/// Boundedness/compactness of T_g for a nonnegative-coefficient symbol.
/// Regimes: p < 1 evaluates the weighted sup quantity, p = 1 the double-sup
/// quantity with recorded truncations, p > 1 the series (where boundedness
/// and compactness coincide).
pub fn bounded_tg(
    p: f64,
    w: &RadialWeight,
    g: &CoefficientSeries,
    opts: &TgOptions,
) -> Result<CriterionReport> {
    require_nonneg_symbol(g)?;
    let mut report = CriterionReport::new("tg-bounded");
    report.params.p = Some(p);
    report.params.weight = Some(w.spec().to_string());
    report.params.symbol = Some(format!("poly:deg={}", g.degree().map_or(0, |d| d)));
    let (unsupported, warnings) = dhat_gate(w)?;
    report.warnings = warnings;
    if unsupported {
        report.verdict = Verdict::Unsupported;
        return Ok(report);
    }
    if g.degree().map_or(0, |d| d) == 0 {
        // constant symbols: T_g = 0
        report.verdict = Verdict::Bounded;
        report.compact_verdict = Some(Verdict::Compact);
        report.summary.value = Some(0.0);
        report.summary.sup_estimate = Some(0.0);
        return Ok(report);
    }
    if p > 1.0 {
        bounded_tg_series(p, w, g, report, -2.0)
    } else if p == 1.0 {
        bounded_tg_p1(w, g, opts, report)
    } else if p > 0.0 {
        bounded_tg_small_p(p, w, g, opts, report)
    } else {
        Err(Error::Domain(format!("p must be positive, got {p}")))
    }
}

/// The same criterion with the (k+1)^{p'-2} series, which governs T_g on the
/// Hardy–Littlewood, Bergman, and shifted-Dirichlet scales simultaneously.
pub fn bounded_tg_xspaces(
    p: f64,
    w: &RadialWeight,
    g: &CoefficientSeries,
) -> Result<CriterionReport> {
    let pp = pp_of(p)?;
    require_nonneg_symbol(g)?;
    let mut report = CriterionReport::new("tg-bounded-xspaces");
    report.params.p = Some(p);
    report.params.weight = Some(w.spec().to_string());
    report.params.symbol = Some(format!("poly:deg={}", g.degree().map_or(0, |d| d)));
    let (unsupported, warnings) = dhat_gate(w)?;
    report.warnings = warnings;
    if unsupported {
        report.verdict = Verdict::Unsupported;
        return Ok(report);
    }
    if g.degree().map_or(0, |d| d) == 0 {
        report.verdict = Verdict::Bounded;
        report.compact_verdict = Some(Verdict::Compact);
        report.summary.value = Some(0.0);
        return Ok(report);
    }
    bounded_tg_series(p, w, g, report, pp - 2.0)
}

fn bounded_tg_series(
    p: f64,
    w: &RadialWeight,
    g: &CoefficientSeries,
    mut report: CriterionReport,
    k_exponent: f64,
) -> Result<CriterionReport> {
    let pp = pp_of(p)?;
    let gc = g.clone();
    let wc = w.clone();
    let log_term = move |x: f64| -> f64 {
        let lm = wc.log_moment(x).unwrap_or(f64::NAN);
        let e = symbol_sum(&gc, x);
        k_exponent * (x + 1.0).ln() - (pp - 1.0) * lm + pp * e.ln()
    };
    let n_exact = if w.power_law().is_some() {
        EXACT_CLOSED
    } else {
        EXACT_QUAD
    };
    let exact: Vec<f64> = (0..n_exact).map(|k| log_term(k as f64)).collect();
    let scan = scan_series_levels(&log_term, &exact, 0, w.moment_scan_octaves().min(900));
    report.samples = scan
        .levels
        .iter()
        .map(|&(d, lv)| Sample {
            at: 2f64.powi(d as i32),
            value: clamp_exp(lv.min(691.0)),
        })
        .collect();
    match scan.trend {
        Trend::Finite { log_value } => {
            report.verdict = Verdict::Bounded;
            report.compact_verdict = Some(Verdict::Compact);
            report.summary.value = Some(clamp_exp(log_value));
        }
        Trend::Divergent { level_slope } => {
            report.verdict = Verdict::Unbounded;
            report.compact_verdict = Some(Verdict::NotCompact);
            report.summary.divergence_slope = Some(level_slope / LN2);
        }
        Trend::Undecided => {
            report.verdict = Verdict::Inconclusive;
            report.compact_verdict = Some(Verdict::Inconclusive);
        }
    }
    Ok(report)
}

fn bounded_tg_small_p(
    p: f64,
    w: &RadialWeight,
    g: &CoefficientSeries,
    opts: &TgOptions,
    mut report: CriterionReport,
) -> Result<CriterionReport> {
    let ip = 1.0 / p;
    let cap = opts
        .octaves
        .unwrap_or(512)
        .min(w.moment_scan_octaves().min(512));
    report.params.grid_depth = Some(cap);
    let gc = g.clone();
    let wc = w.clone();
    let log_s = move |ln_u: f64| -> f64 {
        let u = ln_u.exp();
        let ln_r = (-u).ln_1p();
        let log_term = |x: f64| -> f64 {
            let lm = wc.log_moment(x).unwrap_or(f64::NAN);
            let e = symbol_sum(&gc, x);
            (ip - 1.0) * (x + 1.0).ln() + x * ln_r - ip * lm + e.ln()
        };
        let mut acc = LogSum::new();
        let n_exact = 1024usize;
        for k in 0..n_exact {
            acc.add(log_term(k as f64));
        }
        let k_end = (45.0 / u.max(1e-300)).max((n_exact + 2) as f64);
        let mut lo = n_exact as f64;
        while lo < k_end {
            let hi = (lo * 2.0).min(k_end);
            acc.add(block_log_sum(&log_term, lo, hi));
            lo = hi;
        }
        ln_u + acc.total()
    };
    let scan = trend::scan_sup(log_s, SUP_Q, cap);
    report.samples = thin_samples(&scan.samples);
    match scan.sup {
        Trend::Finite { log_value } => {
            report.verdict = Verdict::Bounded;
            report.summary.sup_estimate = Some(clamp_exp(log_value));
            report.summary.value = Some(clamp_exp(log_value));
        }
        Trend::Divergent { level_slope } => {
            report.verdict = Verdict::Unbounded;
            report.summary.divergence_slope = Some(level_slope / LN2);
        }
        Trend::Undecided => report.verdict = Verdict::Inconclusive,
    }
    report.compact_verdict = Some(match scan.limsup {
        Limsup::Zero => Verdict::Compact,
        Limsup::Positive { .. } | Limsup::Infinite { .. } => Verdict::NotCompact,
        Limsup::Undecided => Verdict::Inconclusive,
    });
    if let Limsup::Positive { log_value } = scan.limsup {
        report.summary.limsup_estimate = Some(clamp_exp(log_value));
    } else if let Limsup::Zero = scan.limsup {
        report.summary.limsup_estimate = Some(0.0);
    }
    Ok(report)
}

/// The p = 1 double-sup quantity at one (r, s) with truncations (K, M):
/// ω̂(r)² Σ_{m<=M} (1-s)/(m+1)² (Σ_{k<=min(m,K)} r^{k+2}/(ωω̂)_{k+1} ·
/// Σ_n ĝ(n+1)(n+1) s^{n+m+3}/(n+k+1))².
pub fn a_omega(
    w: &RadialWeight,
    tp: &RadialWeight,
    g: &CoefficientSeries,
    r: f64,
    s: f64,
    kk: usize,
    mm: usize,
) -> Result<f64> {
    let tail = w.tail(r)?.value;
    // d_k(s) = Σ_n ĝ(n+1)(n+1) s^n/(n+k+1)
    let d = |k: usize| -> f64 {
        let mut acc = 0.0;
        let mut sn = 1.0;
        for n in 1..g.len() {
            acc += g.coeff(n).re * n as f64 * sn / (n as f64 + k as f64);
            sn *= s;
        }
        acc
    };
    let mut prefix = 0.0f64;
    let mut rk = r * r; // r^{k+2} at k = 0
    let mut sm3 = s * s * s; // s^{m+3} at m = 0
    let mut total = 0.0f64;
    for m in 0..=mm {
        if m <= kk {
            let mom = tp.moment(m as f64 + 1.0)?.value;
            prefix += rk * d(m) / mom;
            rk *= r;
        }
        let inner = sm3 * prefix;
        total += (1.0 - s) / ((m as f64 + 1.0) * (m as f64 + 1.0)) * inner * inner;
        sm3 *= s;
    }
    Ok(tail * tail * total)
}

/// The p = 1 compact-form quantity (the r^{k+2} s^{m-k} variant).
pub fn a_omega_compact(
    w: &RadialWeight,
    tp: &RadialWeight,
    g: &CoefficientSeries,
    r: f64,
    s: f64,
    kk: usize,
    mm: usize,
) -> Result<f64> {
    let tail = w.tail(r)?.value;
    let mut t = 0.0f64; // T_m = Σ_{k<=m} r^{k+2} s^{m-k} e_k/(ωω̂)_{k+1}
    let mut rk = r * r;
    let mut total = 0.0f64;
    for m in 0..=mm {
        t *= s;
        if m <= kk {
            let mom = tp.moment(m as f64 + 1.0)?.value;
            t += rk * symbol_sum(g, m as f64) / mom;
            rk *= r;
        }
        total += (1.0 - s) / ((m as f64 + 1.0) * (m as f64 + 1.0)) * t * t;
    }
    Ok(tail * tail * total)
}

fn bounded_tg_p1(
    w: &RadialWeight,
    g: &CoefficientSeries,
    opts: &TgOptions,
    mut report: CriterionReport,
) -> Result<CriterionReport> {
    let tp = RadialWeight::derived(w.clone(), DerivedKind::TailProduct)?;
    let kk = opts.truncation;
    report.params.truncation = Some(kk);
    let ladder: Vec<f64> = (0..=12).map(|j| 1.0 - 2f64.powi(-j)).collect();

    // sup over the diagonal ladder plus off-diagonal spot checks, at a
    // Richardson ladder of truncations
    let sup_at = |trunc: usize| -> Result<f64> {
        let mut best = 0.0f64;
        for &r in &ladder {
            let v = a_omega(w, &tp, g, r, r, trunc, trunc)?;
            best = best.max(v);
        }
        for &i in &[2usize, 6, 10] {
            for &j in &[2usize, 6, 10] {
                let v = a_omega(w, &tp, g, ladder[i], ladder[j], trunc, trunc)?;
                best = best.max(v);
            }
        }
        Ok(best)
    };
    let levels: Vec<f64> = vec![
        sup_at(kk / 4)?,
        sup_at(kk / 2)?,
        sup_at(kk)?,
        sup_at(2 * kk)?,
    ];
    let tail_est = (levels[3] - levels[2]).abs();
    report.summary.sup_estimate = Some(levels[3]);
    report.summary.value = Some(levels[3]);
    report
        .warnings
        .push(format!("truncation-doubling tail estimate {tail_est:.3e}"));
    let ratios: Vec<f64> = (1..levels.len())
        .map(|i| levels[i] / levels[i - 1].max(f64::MIN_POSITIVE))
        .collect();
    report.verdict = if ratios.iter().rev().take(2).all(|r| (r - 1.0).abs() < 1e-3) {
        Verdict::Bounded
    } else if ratios.iter().all(|r| *r >= trend::LEVEL_GROWTH) {
        Verdict::Unbounded
    } else {
        Verdict::Inconclusive
    };

    // compactness: the double limsup estimated on the diagonal first
    let diag: Vec<f64> = ladder
        .iter()
        .map(|&r| a_omega_compact(w, &tp, g, r, r, kk, kk))
        .collect::<Result<_>>()?;
    report.samples = diag
        .iter()
        .enumerate()
        .map(|(j, &v)| Sample {
            at: 2f64.powi(-(j as i32)),
            value: v,
        })
        .collect();
    let n = diag.len();
    let tail3 = &diag[n - 4..];
    let overall_max = diag.iter().fold(0.0f64, |a, &b| a.max(b));
    let decreasing = tail3.windows(2).all(|w| w[1] <= 0.7 * w[0]);
    let stable = tail3
        .windows(2)
        .all(|w| (w[1] / w[0].max(f64::MIN_POSITIVE) - 1.0).abs() < 1e-2);
    report.compact_verdict = Some(if decreasing && tail3[3] < 1e-6 * overall_max.max(1e-300) {
        Verdict::Compact
    } else if stable && tail3[3] > 0.0 {
        report.summary.limsup_estimate = Some(tail3[3]);
        Verdict::NotCompact
    } else {
        Verdict::Inconclusive
    });
    Ok(report)
}

// ---------------------------------------------------------------------------
// embedding integrals (p > 1)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScanOutcome {
    Finite { value: f64 },
    Divergent { octave_slope: f64 },
    Undecided,
}

impl ScanOutcome {
    fn from_trend(t: &Trend) -> Self {
        match t {
            Trend::Finite { log_value } => ScanOutcome::Finite {
                value: clamp_exp(*log_value),
            },
            Trend::Divergent { level_slope } => ScanOutcome::Divergent {
                octave_slope: level_slope / LN2,
            },
            Trend::Undecided => ScanOutcome::Undecided,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ScanOutcome::Finite { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, ScanOutcome::Divergent { .. })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub p: f64,
    pub weight: String,
    /// ∫ (1-r)^{p'} ω̂^{1-p'} dr — the triviality integral
    pub thm_integral: ScanOutcome,
    /// ∫ (1-r)^{p'} ω̂^{1-p'} · ω/ω̂ dr — the embedding lower bound
    pub lower_bound: ScanOutcome,
    /// ∫ (∫_0^r (r-s)/((1-s) ω̂(s)) ds)^{p'} ω(r) dr — the embedding quantity
    pub b_norm: ScanOutcome,
    pub warnings: Vec<String>,
}

/// Evaluate the embedding-side integrals and the triviality integral for one
/// weight, each with independent divergence detection.
pub fn embedding_integrals(p: f64, w: &RadialWeight) -> Result<EmbeddingReport> {
    let pp = pp_of(p)?;
    let mut warnings = Vec::new();
    let cap = w.tail_scan_octaves().min(900);
    let te = TailEval::new(w, cap + 4)?;

    let thm = scan_integral_levels(&|ln_u| pp * ln_u - (pp - 1.0) * te.log_tail(ln_u), cap);

    let lower = match w.log_eval_u(-1.0) {
        Some(_) => {
            let wl = w.clone();
            let scan = scan_integral_levels(
                &|ln_u| {
                    pp * ln_u - pp * te.log_tail(ln_u)
                        + wl.log_eval_u(ln_u).unwrap_or(f64::NEG_INFINITY)
                },
                cap,
            );
            scan.trend
        }
        None => {
            warnings.push("no log form for the weight itself; lower bound undecided".into());
            Trend::Undecided
        }
    };

    // inner integral ∫_u^1 (v-u)/(v ω̂(1-v)) dv in log space
    let log_inner = |ln_u: f64| -> f64 {
        let u = ln_u.exp();
        let mut acc = LogSum::new();
        let strips = (2.0 * (-ln_u) / LN2).ceil().max(2.0) as usize;
        let h = -ln_u / strips as f64;
        for k in 0..strips {
            let lo = ln_u + k as f64 * h;
            let c = lo + 0.5 * h;
            for i in 0..16 {
                let ln_v = c + 0.5 * h * GL16_X[i];
                let v = ln_v.exp();
                if v <= u {
                    continue;
                }
                let li = (v - u).ln() - ln_v - te.log_tail(ln_v);
                acc.add(li + ln_v + (0.5 * h * GL16_W[i]).ln());
            }
        }
        acc.total()
    };
    let b_norm = match w.log_eval_u(-1.0) {
        Some(_) => {
            let wl = w.clone();
            // the inner integral is expensive; a shallower cap keeps this
            // desk-scale while still resolving power-type divergence
            let scan = scan_integral_levels(
                &|ln_u| pp * log_inner(ln_u) + wl.log_eval_u(ln_u).unwrap_or(f64::NEG_INFINITY),
                cap.min(256),
            );
            scan.trend
        }
        None => Trend::Undecided,
    };

    Ok(EmbeddingReport {
        p,
        weight: w.spec().to_string(),
        thm_integral: ScanOutcome::from_trend(&thm.trend),
        lower_bound: ScanOutcome::from_trend(&lower),
        b_norm: ScanOutcome::from_trend(&b_norm),
        warnings,
    })
}

/// The standard-weight sweep of `embedding_integrals`.
pub fn embedding_sweep(p: f64, alphas: &[f64]) -> Result<Vec<(f64, EmbeddingReport)>> {
    alphas
        .iter()
        .map(|&a| {
            let w = RadialWeight::standard(a, false)?;
            Ok((a, embedding_integrals(p, &w)?))
        })
        .collect()
}

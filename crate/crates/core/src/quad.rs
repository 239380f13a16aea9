//! Adaptive Gauss–Kronrod panels with a geometric endpoint ladder.
//!
//! Radial integrals on [0,1) are always driven in the variable u = 1 - r, so
//! the only delicate endpoint is u -> 0.  `integrate_to_zero` splits the range
//! on the dyadic ladder u = upper * 2^{-j} before adapting, which tames
//! integrable power singularities without any special-casing.

use crate::error::{Error, Result};

/// A value with an absolute error estimate attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qty {
    pub value: f64,
    pub err: f64,
}

impl Qty {
    pub fn exact(value: f64) -> Self {
        Qty {
            value,
            err: value.abs() * 4.0 * f64::EPSILON,
        }
    }
}

/// Quadrature budget and tolerance settings.
#[derive(Debug, Clone, Copy)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Split point generator: mandatory dyadic splits at u = 2^{-j}.
    pub ladder_octaves: u32,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_panels: 4000,
            ladder_octaves: 50,
        }
    }
}

// 15-point Kronrod abscissae (positive half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

// Kronrod weights matching XGK.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// 7-point Gauss weights (nodes are XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_96,
    0.417_959_183_673_469_4,
];

/// One G7-K15 panel. Returns (kronrod, error estimate, resabs).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        let sum = f1 + f2;
        res_k += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * sum;
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * 1.0_f64.min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err, res_abs)
}

/// Adaptive integration of `f` over [a, b] by worst-panel bisection.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, s: &QuadSettings) -> Result<Qty> {
    if a == b {
        return Ok(Qty {
            value: 0.0,
            err: 0.0,
        });
    }
    let (v, e, _) = qk15(f, a, b);
    if !v.is_finite() {
        return Err(Error::Domain(format!(
            "integrand produced a non-finite value on [{a}, {b}]"
        )));
    }
    let mut panels: Vec<(f64, f64, f64, f64)> = vec![(e, a, b, v)];
    loop {
        let value: f64 = panels.iter().map(|p| p.3).sum();
        let err: f64 = panels.iter().map(|p| p.0).sum();
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "integrand produced a non-finite value on [{a}, {b}]"
            )));
        }
        let tol = s.abs_tol.max(s.rel_tol * value.abs());
        if err <= tol {
            return Ok(Qty { value, err });
        }
        if panels.len() >= s.max_panels {
            return Err(Error::Tolerance {
                achieved: err,
                requested: tol,
            });
        }
        // split the worst panel
        let (i, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
            .unwrap();
        let (_, pa, pb, _) = panels.swap_remove(i);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // interval exhausted at machine precision; keep it
            let (v, _, _) = qk15(f, pa, pb);
            panels.push((0.0, pa, pb, v));
            continue;
        }
        let (v1, e1, _) = qk15(f, pa, mid);
        let (v2, e2, _) = qk15(f, mid, pb);
        panels.push((e1, pa, mid, v1));
        panels.push((e2, mid, pb, v2));
    }
}

/// Integrate f over (0, upper] where f may have an integrable singularity at 0.
///
/// Dyadic strips [upper 2^{-j-1}, upper 2^{-j}] are integrated adaptively; the
/// ladder stops when the remaining strips are provably below tolerance, with a
/// geometric bound on the neglected tail folded into the error estimate.
pub fn integrate_to_zero<F: Fn(f64) -> f64>(f: &F, upper: f64, s: &QuadSettings) -> Result<Qty> {
    match integrate_down(f, upper, 0.0, s)? {
        (q, None) => Ok(q),
        (q, Some(_)) => Ok(q), // lower = 0 is never reached; tail already bounded
    }
}

/// Like `integrate_to_zero` but stops at `lower`; when the ladder reaches
/// `lower` before the strips die out, returns the partial integral together
/// with the cutoff so the caller can attach an analytic tail.
pub fn integrate_down<F: Fn(f64) -> f64>(
    f: &F,
    upper: f64,
    lower: f64,
    s: &QuadSettings,
) -> Result<(Qty, Option<f64>)> {
    if upper <= 0.0 {
        return Ok((
            Qty {
                value: 0.0,
                err: 0.0,
            },
            None,
        ));
    }
    let strip = QuadSettings {
        abs_tol: s.abs_tol / 8.0,
        rel_tol: s.rel_tol / 8.0,
        max_panels: 600,
        ladder_octaves: s.ladder_octaves,
    };
    let mut total = 0.0;
    let mut err = 0.0;
    let mut prev_mag = f64::INFINITY;
    let mut hi = upper;
    for j in 0..1060u32 {
        let lo = hi * 0.5;
        let q = adaptive(f, lo, hi, &strip)?;
        total += q.value;
        err += q.err;
        let mag = q.value.abs();
        let tol = s.abs_tol.max(s.rel_tol * total.abs());
        if j >= s.ladder_octaves && mag < prev_mag {
            // geometric extrapolation of the remaining strips; exact for
            // power-law decay, conservative otherwise
            let rho = if prev_mag > 0.0 {
                (mag / prev_mag).clamp(0.0, 0.97)
            } else {
                0.5
            };
            let tail = mag * rho / (1.0 - rho);
            if tail < 0.25 * tol {
                total += q.value.signum() * tail;
                err += tail + mag;
                return Ok((Qty { value: total, err }, None));
            }
        }
        prev_mag = mag;
        hi = lo;
        if hi <= lower.max(1e-300) {
            break;
        }
    }
    if lower > 0.0 && hi <= lower {
        // reached the requested cutoff; the caller owns the remaining tail
        return Ok((Qty { value: total, err }, Some(hi)));
    }
    // Ladder exhausted without the tail provably vanishing.
    let tol = s.abs_tol.max(s.rel_tol * total.abs());
    if prev_mag < tol {
        Ok((
            Qty {
                value: total,
                err: err + prev_mag,
            },
            None,
        ))
    } else {
        Err(Error::Tolerance {
            achieved: prev_mag,
            requested: tol,
        })
    }
}

// 16-point Gauss–Legendre rule on [-1, 1].
pub const GL16_X: [f64; 16] = [
    -0.989_400_934_991_649_9,
    -0.944_575_023_073_232_6,
    -0.865_631_202_387_831_7,
    -0.755_404_408_355_003_0,
    -0.617_876_244_402_643_7,
    -0.458_016_777_657_227_4,
    -0.281_603_550_779_258_9,
    -0.095_012_509_837_637_44,
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003_0,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];

pub const GL16_W: [f64; 16] = [
    0.027_152_459_411_754_095,
    0.062_253_523_938_647_89,
    0.095_158_511_682_492_78,
    0.124_628_971_255_533_87,
    0.149_595_988_816_576_73,
    0.169_156_519_395_002_54,
    0.182_603_415_044_923_59,
    0.189_450_610_455_068_5,
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_59,
    0.169_156_519_395_002_54,
    0.149_595_988_816_576_73,
    0.124_628_971_255_533_87,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_095,
];

/// Plain 16-point Gauss–Legendre on [a, b].
pub fn gl16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..16 {
        acc += GL16_W[i] * f(c + h * GL16_X[i]);
    }
    acc * h
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    sum: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn total(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// log(e^a + e^b).
pub fn logaddexp(a: f64, b: f64) -> f64 {
    let mut acc = LogSum::new();
    acc.add(a);
    acc.add(b);
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_polynomial_is_exact() {
        let s = QuadSettings::default();
        let q = adaptive(&|x: f64| 3.0 * x * x, 0.0, 2.0, &s).unwrap();
        assert!((q.value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let s = QuadSettings::default();
        let q = integrate_to_zero(&|x: f64| x.powf(-0.5), 1.0, &s).unwrap();
        assert!((q.value - 2.0).abs() < 1e-8, "got {}", q.value);

        // ∫_0^1 x^{-0.9} dx = 10 needs a deep ladder
        let q = integrate_to_zero(&|x: f64| x.powf(-0.9), 1.0, &s).unwrap();
        assert!((q.value - 10.0).abs() < 1e-6 * 10.0, "got {}", q.value);
    }

    #[test]
    fn gl16_handles_smooth_integrand() {
        let v = gl16(&|x: f64| x.exp(), 0.0, 1.0);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn logsum_accumulates() {
        let mut ls = LogSum::new();
        for _ in 0..4 {
            ls.add(100.0);
        }
        assert!((ls.total() - (100.0 + 4.0f64.ln())).abs() < 1e-12);
        assert_eq!(LogSum::new().total(), f64::NEG_INFINITY);
        assert!((logaddexp(0.0, 0.0) - std::f64::consts::LN_2).abs() < 1e-14);
    }
}

//! Reproducing kernels of weighted D² spaces and the dual test functions
//! G_{g,z} whose norm sup over z surrogates the operator norm.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::CoefficientSeries;
use crate::spaces;
use crate::weight::RadialWeight;

/// Coefficient table of the reproducing kernel of D²_ν:
/// K_ζ(w) = 1 + Σ_{k≥1} ζ̄^k w^k / (2 k² ν_{2k-1}).
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub nu: RadialWeight,
    pub k_max: usize,
    /// c_0 = 1, c_k = 1/(2 k² ν_{2k-1})
    pub c: Vec<f64>,
    /// absolute error estimates carried over from the moments
    pub c_err: Vec<f64>,
}

/// Build the kernel coefficient table up to degree k_max.
pub fn kernel(nu: &RadialWeight, k_max: usize) -> Result<KernelSpec> {
    if k_max < 1 {
        return Err(Error::Domain("kernel needs k_max >= 1".into()));
    }
    let mut c = Vec::with_capacity(k_max + 1);
    let mut c_err = Vec::with_capacity(k_max + 1);
    c.push(1.0);
    c_err.push(0.0);
    for k in 1..=k_max {
        let kf = k as f64;
        let m = nu.moment(2.0 * kf - 1.0)?;
        if !(m.value > 0.0) {
            return Err(Error::Domain(format!(
                "kernel needs positive moments; ν_{} of {} is {}",
                2 * k - 1,
                nu.spec(),
                m.value
            )));
        }
        let v = 1.0 / (2.0 * kf * kf * m.value);
        c.push(v);
        c_err.push(v * m.err / m.value);
    }
    Ok(KernelSpec {
        nu: nu.clone(),
        k_max,
        c,
        c_err,
    })
}

impl KernelSpec {
    /// K_ζ as a polynomial in w.
    pub fn at(&self, zeta: Complex64) -> CoefficientSeries {
        let mut coeffs = Vec::with_capacity(self.k_max + 1);
        let mut zk = Complex64::new(1.0, 0.0);
        for k in 0..=self.k_max {
            coeffs.push(self.c[k] * zk.conj());
            zk *= zeta;
        }
        CoefficientSeries::new(coeffs)
    }
}

/// The dual test function G_{g,z} of the pairing weight ν, stored through the
/// coefficients b_k of conj(G_{g,z}(w)) = b_0 + Σ_{k≥1} b_k conj(w)^k:
/// b_0 = Σ_n ĝ(n+1) z^{n+1}, b_k = c_k Σ_n ĝ(n+1)(n+1) z^{n+k+1}/(n+k+1).
#[derive(Debug, Clone)]
pub struct GFunction {
    pub z: Complex64,
    pub b: Vec<Complex64>,
    /// G_{g,z} itself as a polynomial in w (coefficients conj(b_k))
    pub series: CoefficientSeries,
    /// estimated truncation tail relative to Σ|b_k|
    pub tail_frac: f64,
}

/// Exact coefficients of G_{g,z} for a polynomial symbol g.
pub fn g_function(g: &CoefficientSeries, z: Complex64, ker: &KernelSpec) -> Result<GFunction> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "G function needs |z| < 1, got {}",
            z.norm()
        )));
    }
    let deg = g.degree().unwrap_or(0);
    let mut b = Vec::with_capacity(ker.k_max + 1);

    // b_0 = g(z) - g(0)
    let mut b0 = Complex64::new(0.0, 0.0);
    let mut zp = z; // z^{n+1}
    for n in 0..deg {
        b0 += g.coeff(n + 1) * zp;
        zp *= z;
    }
    b.push(b0);

    for k in 1..=ker.k_max {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zp = z.powu(k as u32 + 1); // z^{n+k+1} at n = 0
        for n in 0..deg {
            let coeff = g.coeff(n + 1) * (n as f64 + 1.0) / (n as f64 + k as f64 + 1.0);
            acc += coeff * zp;
            zp *= z;
        }
        b.push(ker.c[k] * acc);
    }

    // geometric extrapolation of the dropped coefficients
    let sum_abs: f64 = b.iter().map(|x| x.norm()).sum();
    let tail_frac = if ker.k_max >= 8 && sum_abs > 0.0 {
        let last = b[ker.k_max].norm();
        let back = b[ker.k_max - 4].norm();
        let rho = if back > 0.0 {
            (last / back).powf(0.25).min(0.99)
        } else {
            0.0
        };
        last * rho / (1.0 - rho) / sum_abs
    } else {
        0.0
    };

    let series = CoefficientSeries::new(b.iter().map(|x| x.conj()).collect());
    Ok(GFunction {
        z,
        b,
        series,
        tail_frac,
    })
}

/// Which norm measures the G family, matching the duality regime.
#[derive(Debug, Clone)]
pub enum GNormKind {
    /// p < 1 regime: Zygmund norm, pairing weight W_{p,ω}
    Zygmund,
    /// p = 1 regime: BMOA'(∞,ω) norm, pairing weight ω·ω̂
    BmoaPrimeInf(RadialWeight),
    /// p > 1 regime: D^{p'}_ω norm, pairing weight ω
    Dpw { p: f64, weight: RadialWeight },
}

#[derive(Debug, Clone)]
pub struct SupGNorm {
    pub value: f64,
    pub at: Complex64,
    /// (|z|, norm) samples in grid order
    pub samples: Vec<(f64, f64)>,
    pub truncation: usize,
    pub warnings: Vec<String>,
}

/// Radial ladder z-grid: 1 - 2^{-j}, j = 0..=depth, times `angles` rotations
/// (1 keeps the nonnegative-symbol real-axis grid).
pub fn z_grid(depth: u32, angles: usize) -> Vec<Complex64> {
    let mut zs = Vec::new();
    for j in 0..=depth {
        let r = 1.0 - 2f64.powi(-(j as i32));
        if angles <= 1 || r == 0.0 {
            zs.push(Complex64::new(r, 0.0));
        } else {
            for a in 0..angles {
                let t = 2.0 * std::f64::consts::PI * a as f64 / angles as f64;
                zs.push(Complex64::from_polar(r, t));
            }
        }
    }
    zs
}

/// sup over the z grid of the chosen norm of the truncated G function.
///
/// For symbols with nonnegative coefficients the sup is attained on [0, 1),
/// so the default grid is the real-axis ladder; a full grid can be passed for
/// verification.
pub fn sup_g_norm(
    g: &CoefficientSeries,
    nu: &RadialWeight,
    kind: &GNormKind,
    zs: &[Complex64],
    k_max: usize,
) -> Result<SupGNorm> {
    let ker = kernel(nu, k_max)?;
    let mut best = (0.0f64, Complex64::new(0.0, 0.0));
    let mut samples = Vec::with_capacity(zs.len());
    let mut warnings = Vec::new();
    let mut worst_tail: f64 = 0.0;
    for &z in zs {
        let gf = g_function(g, z, &ker)?;
        worst_tail = worst_tail.max(gf.tail_frac);
        let v = match kind {
            GNormKind::Zygmund => spaces::norm_zygmund(&gf.series).value,
            GNormKind::BmoaPrimeInf(w) => spaces::norm_bmoa_prime_inf(&gf.series, w)?.value,
            GNormKind::Dpw { p, weight } => spaces::norm_dpw(&gf.series, *p, weight)?.value,
        };
        samples.push((z.norm(), v));
        if v > best.0 {
            best = (v, z);
        }
    }
    if worst_tail > 0.01 {
        warnings.push(format!(
            "truncation tail estimate {worst_tail:.2e} exceeds 1% of the coefficient mass"
        ));
    }
    Ok(SupGNorm {
        value: best.0,
        at: best.1,
        samples,
        truncation: k_max,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::PairingKind;
    use crate::weight::DerivedKind;

    #[test]
    fn constant_weight_kernel_coefficients() {
        // ν ≡ 1: ν_{2k-1} = 1/(2k), so c_k = 1/(2k² · 1/(2k)) = 1/k
        let ker = kernel(&RadialWeight::constant(), 8).unwrap();
        assert_eq!(ker.c[0], 1.0);
        for k in 1..=8usize {
            assert!((ker.c[k] - 1.0 / k as f64).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn reproduction_property() {
        // ⟨f, K_ζ⟩_{D²_ν} = f(ζ), forced by construction through the shared
        // moment cache
        let nus = [
            RadialWeight::constant(),
            RadialWeight::derived(RadialWeight::constant(), DerivedKind::DualW { p: 0.75 })
                .unwrap(),
            RadialWeight::derived(RadialWeight::constant(), DerivedKind::TailProduct).unwrap(),
        ];
        let f = CoefficientSeries::from_real(&[0.5, -1.0, 0.25, 0.0, 2.0]);
        for nu in &nus {
            let ker = kernel(nu, 8).unwrap();
            for &(r, t) in &[(0.0, 0.0), (0.5, 1.0), (0.9, -2.0)] {
                let zeta = Complex64::from_polar(r, t);
                let k = ker.at(zeta);
                let got = crate::spaces::pairing(&f, &k, &PairingKind::D2(nu.clone())).unwrap();
                let expect = f.eval(zeta);
                assert!(
                    (got - expect).norm() <= 1e-10 * (1.0 + expect.norm()),
                    "nu={} zeta=({r},{t}): {got} vs {expect}",
                    nu.spec()
                );
            }
        }
    }

    #[test]
    fn g_function_of_z_symbol() {
        // g = z has only the n = 0 term: b_k = c_k ∫_0^z ζ^k dζ / 1
        //                                     = c_k z^{k+1}/(k+1), b_0 = z
        let ker = kernel(&RadialWeight::constant(), 6).unwrap();
        let g = CoefficientSeries::monomial(1);
        let z = Complex64::new(0.7, 0.1);
        let gf = g_function(&g, z, &ker).unwrap();
        assert!((gf.b[0] - z).norm() < 1e-14);
        for k in 1..=6usize {
            let expect = ker.c[k] * z.powu(k as u32 + 1) / (k as f64 + 1.0);
            assert!((gf.b[k] - expect).norm() < 1e-14, "k={k}");
        }
        // constant symbols give the zero G function
        let c = CoefficientSeries::from_real(&[5.0]);
        let gf = g_function(&c, z, &ker).unwrap();
        assert!(gf.series.is_zero());
        // z = 0 gives the zero G function
        let gf = g_function(&g, Complex64::new(0.0, 0.0), &ker).unwrap();
        assert!(gf.series.is_zero());
    }

    #[test]
    fn sup_g_norm_scaling_and_units() {
        let w = RadialWeight::constant();
        let g = CoefficientSeries::monomial(1);
        let zs = z_grid(8, 1);
        let kind = GNormKind::Zygmund;
        let one = sup_g_norm(&g, &w, &kind, &zs, 64).unwrap();
        let two = sup_g_norm(&g.scale_real(2.0), &w, &kind, &zs, 64).unwrap();
        assert!((two.value - 2.0 * one.value).abs() < 1e-10 * two.value);
        // constant symbol: sup is zero
        let zero = sup_g_norm(&CoefficientSeries::one(), &w, &kind, &zs, 64).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn rejects_boundary_evaluation_points() {
        let ker = kernel(&RadialWeight::constant(), 4).unwrap();
        let g = CoefficientSeries::monomial(1);
        assert!(g_function(&g, Complex64::new(1.0, 0.0), &ker).is_err());
    }
}

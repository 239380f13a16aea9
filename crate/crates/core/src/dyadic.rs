//! Dyadic blocks, weight-generated blocks, Hadamard products, and the
//! decomposition-norm comparison.

use crate::error::{Error, Result};
use crate::poly::CoefficientSeries;
use crate::report::{RatioPair, RatioSweep};
use crate::spaces;
use crate::weight::RadialWeight;

/// Coefficient slice of f over the dyadic block n. Block 0 covers indices
/// {0, 1} so that the blocks partition all of N and Σ_n of the blocks
/// reassembles f; blocks n >= 1 cover [2^n, 2^{n+1}).
pub fn dyadic_block(f: &CoefficientSeries, n: u32) -> CoefficientSeries {
    if n == 0 {
        f.slice(0, 2)
    } else {
        f.slice(1 << n, 1 << (n + 1))
    }
}

/// The unit dyadic polynomial: 1 for n = 0, Σ_{k=2^n}^{2^{n+1}-1} z^k else.
pub fn unit_block(n: u32) -> CoefficientSeries {
    if n == 0 {
        return CoefficientSeries::one();
    }
    let lo = 1usize << n;
    let hi = 1usize << (n + 1);
    let mut c = vec![0.0; hi];
    for x in c.iter_mut().take(hi).skip(lo) {
        *x = 1.0;
    }
    CoefficientSeries::from_real(&c)
}

/// ‖Δ_n‖_{H^p} / 2^{n/p'} for n = 0..=n_max (1 < p < ∞).
pub fn delta_norm_sweep(p: f64, n_max: u32) -> Result<RatioSweep> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!(
            "the dyadic block norm growth 2^(n/p') needs p > 1, got {p}"
        )));
    }
    let pp = p / (p - 1.0);
    let mut pairs = Vec::new();
    for n in 0..=n_max {
        let lhs = spaces::norm_hp(&unit_block(n), p)?.value;
        let rhs = 2f64.powf(n as f64 / pp);
        pairs.push(RatioPair {
            at: n as f64,
            lhs,
            rhs,
            ratio: lhs / rhs,
        });
    }
    Ok(RatioSweep::from_pairs(format!("delta_norm:p={p}"), pairs))
}

/// Coefficientwise (Hadamard) product.
pub fn hadamard(f: &CoefficientSeries, g: &CoefficientSeries) -> CoefficientSeries {
    f.hadamard(g)
}

/// The block partition generated by the tail levels ω̂(r_n) = 2^{-n}
/// (after scaling the weight to unit mass).
#[derive(Debug, Clone)]
pub struct BlockPartition {
    pub weight: String,
    /// mass of the weight before unit normalization
    pub scale: f64,
    /// u_n = 1 - r_n
    pub u_n: Vec<f64>,
    /// defining residual |ω̂(r_n)/mass - 2^{-n}| at each level
    pub residual: Vec<f64>,
    pub m_n: Vec<u64>,
    pub warnings: Vec<String>,
}

impl BlockPartition {
    /// Index block I_ω(n) = [M_n, M_{n+1}) with I_ω(0) = [0, M_1).
    pub fn block(&self, n: usize) -> (u64, u64) {
        let lo = if n == 0 { 0 } else { self.m_n[n] };
        (lo, self.m_n[n + 1])
    }

    pub fn levels(&self) -> usize {
        self.m_n.len().saturating_sub(1)
    }

    /// Coefficient slice of f over I_ω(n).
    pub fn block_of(&self, f: &CoefficientSeries, n: usize) -> CoefficientSeries {
        let (lo, hi) = self.block(n);
        f.slice(lo as usize, hi as usize)
    }
}

/// E(x): the integer with E(x) <= x < E(x)+1, with a guard sized to the
/// root-finder accuracy so an exactly integral x is not dropped by one.
fn floor_guarded(x: f64) -> u64 {
    (x + 1e-9 + 4e-13 * x).floor() as u64
}

/// Largest partition depth (capped at `cap`) whose levels are reachable in
/// f64 and whose block indices fit an integer: slowly decaying tails (log
/// type) push r_n toward 1 super-geometrically and degenerate quickly.
pub fn feasible_levels(w: &RadialWeight, cap: u32) -> u32 {
    let mass = match w.tail_u(1.0) {
        Ok(q) => q.value,
        Err(_) => return 0,
    };
    // u_n must stay above 2^-61 so M_n = E(1/u_n) fits comfortably in u64
    let lt = match w.log_tail_u(-61.0 * std::f64::consts::LN_2) {
        Some(v) => v,
        None => return cap.min(8),
    };
    let levels = ((mass.ln() - lt) / std::f64::consts::LN_2 - 1.0).floor();
    if levels.is_finite() && levels >= 0.0 {
        cap.min(levels as u32)
    } else {
        0
    }
}

/// Solve ω̂(r_n) = mass · 2^{-n} for n = 0..=n_max by bisection in ln u.
pub fn omega_partition(w: &RadialWeight, n_max: u32) -> Result<BlockPartition> {
    let mass = w.tail_u(1.0)?.value;
    let mut u_n = Vec::with_capacity(n_max as usize + 1);
    let mut residual = Vec::with_capacity(n_max as usize + 1);
    let mut m_n = Vec::with_capacity(n_max as usize + 1);
    let mut warnings = Vec::new();

    for n in 0..=n_max {
        let target = mass * 2f64.powi(-(n as i32));
        let u = if n == 0 {
            1.0
        } else {
            // bisection on ln u; the tail is monotone increasing in u
            let tail_at = |ln_u: f64| -> Result<f64> {
                if let Some(v) = w.log_tail_u(ln_u) {
                    Ok(v)
                } else {
                    Err(Error::RootFind(format!(
                        "tail of {} not evaluable at ln u = {ln_u}",
                        w.spec()
                    )))
                }
            };
            let lt = target.ln();
            // grow the lower bracket geometrically; fast-decaying tails stop
            // being evaluable long before ln u = -750
            let mut lo = -2.0f64;
            loop {
                match tail_at(lo) {
                    Ok(v) if v <= lt => break,
                    Ok(_) if lo > -745.0 => lo *= 2.0,
                    _ => {
                        return Err(Error::RootFind(format!(
                            "tail level 2^-{n} unreachable for {}",
                            w.spec()
                        )))
                    }
                }
            }
            let mut hi = 0.0f64;
            for _ in 0..90 {
                let mid = 0.5 * (lo + hi);
                if tail_at(mid)? >= lt {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (0.5 * (lo + hi)).exp()
        };
        let achieved = w.tail_u(u)?.value / mass;
        residual.push((achieved - 2f64.powi(-(n as i32))).abs());
        u_n.push(u);
        if 1.0 / u > 4.0e18 {
            return Err(Error::RootFind(format!(
                "block index 1/(1-r_{n}) overflows for {}; use feasible_levels",
                w.spec()
            )));
        }
        let m = floor_guarded(1.0 / u);
        if let Some(&prev) = m_n.last() {
            if m == prev {
                warnings.push(format!(
                    "empty block at level {n}: M_{n} = M_{} = {m}",
                    n - 1
                ));
            }
            if m < prev {
                return Err(Error::RootFind(format!(
                    "partition levels out of order at n = {n} for {}",
                    w.spec()
                )));
            }
        }
        m_n.push(m);
    }
    Ok(BlockPartition {
        weight: w.spec().to_string(),
        scale: mass,
        u_n,
        residual,
        m_n,
        warnings,
    })
}

/// Ratio of the block-decomposition quantity
/// Σ_j 2^{-j} ‖Δ_j^ω f'‖_{H^q}^q + |f(0)|^q to ‖f‖_{D^q_ω}^q.
pub fn decomposition_norm_check(
    q: f64,
    w: &RadialWeight,
    part: &BlockPartition,
    f: &CoefficientSeries,
) -> Result<RatioPair> {
    if !(q > 1.0) {
        return Err(Error::Domain(format!(
            "decomposition norms need q > 1, got {q}"
        )));
    }
    let fp = f.derivative();
    let mut lhs = f.coeff(0).norm().powf(q);
    let deg = fp.degree().unwrap_or(0) as u64;
    for j in 0..part.levels() {
        let (lo, _) = part.block(j);
        if lo > deg {
            break;
        }
        let piece = part.block_of(&fp, j);
        if piece.is_zero() {
            continue;
        }
        let h = spaces::norm_hp(&piece, q)?.value;
        lhs += 2f64.powi(-(j as i32)) * h.powf(q);
    }
    let rhs = spaces::norm_dpw_pth(f, q, w)?.value;
    Ok(RatioPair {
        at: deg as f64,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_slicing() {
        // f = Σ_{k<=8} z^k, block 2 is z^4 + ... + z^7
        let f = CoefficientSeries::from_real(&[1.0; 9]);
        let b2 = dyadic_block(&f, 2);
        assert_eq!(b2.coeff(3).re, 0.0);
        assert_eq!(b2.coeff(4).re, 1.0);
        assert_eq!(b2.coeff(7).re, 1.0);
        assert_eq!(b2.coeff(8).re, 0.0);
        // blocks of a low-degree polynomial vanish
        let low = CoefficientSeries::from_real(&[1.0, 1.0, 1.0]);
        assert!(dyadic_block(&low, 3).is_zero());
        // Σ_n Δ_n f = f
        let mut sum = CoefficientSeries::zero();
        for n in 0..5 {
            sum = sum.add(&dyadic_block(&f, n));
        }
        assert_eq!(sum, f);
    }

    #[test]
    fn delta_norms_at_p2_are_exact() {
        let sweep = delta_norm_sweep(2.0, 6).unwrap();
        for pair in &sweep.pairs {
            assert!(
                (pair.ratio - 1.0).abs() < 1e-12,
                "n={}: {}",
                pair.at,
                pair.ratio
            );
        }
    }

    #[test]
    fn hadamard_identity_and_commutativity() {
        let f = CoefficientSeries::from_real(&[1.0, -2.0, 0.5]);
        let id = CoefficientSeries::from_real(&[1.0, 1.0, 1.0]);
        assert_eq!(hadamard(&f, &id), f);
        assert!(hadamard(&f, &CoefficientSeries::zero()).is_zero());
        let g = CoefficientSeries::from_real(&[0.3, 0.7, -1.1]);
        assert_eq!(hadamard(&f, &g), hadamard(&g, &f));
    }

    #[test]
    fn const_weight_partition_is_exact() {
        let w = RadialWeight::constant();
        let part = omega_partition(&w, 30).unwrap();
        for n in 0..=30usize {
            let expect_u = 2f64.powi(-(n as i32));
            assert!(
                (part.u_n[n] - expect_u).abs() <= 1e-12 * expect_u,
                "n={n}: {} vs {}",
                part.u_n[n],
                expect_u
            );
            assert_eq!(part.m_n[n], 1u64 << n, "n={n}");
            assert!(part.residual[n] <= 1e-12);
        }
        assert!(part.warnings.is_empty());
    }

    #[test]
    fn standard_partition_matches_tail_inversion() {
        // ω = (1-r): ω̂ = (1-r)²/2, mass 1/2. ω̂(r_n)/mass = 2^{-n} means
        // (1-r_n)² = 2^{-n}, i.e. u_n = 2^{-n/2}.
        let w = RadialWeight::standard(1.0, false).unwrap();
        let part = omega_partition(&w, 20).unwrap();
        for n in 0..=20usize {
            let expect = 2f64.powf(-(n as f64) / 2.0);
            assert!(
                (part.u_n[n] - expect).abs() < 1e-11 * expect,
                "n={n}: {} vs {expect}",
                part.u_n[n]
            );
        }
    }

    #[test]
    fn normalized_standard_partition_matches_tail_inversion() {
        // ω = 2(1-r²): ω̂(u) = 2u²(1 - u/3), mass 4/3. The partition solves
        // ω̂(u_n) = (4/3)·2^{-n}; check it against a closed inversion oracle.
        let w = RadialWeight::standard(1.0, true).unwrap();
        let part = omega_partition(&w, 16).unwrap();
        for n in 1..=16usize {
            let target = 4.0 / 3.0 * 2f64.powi(-(n as i32));
            // Newton refinement of the closed tail equation as the oracle
            let mut u = (target / 2.0).sqrt();
            for _ in 0..60 {
                let f = 2.0 * u * u * (1.0 - u / 3.0) - target;
                let df = 4.0 * u - 2.0 * u * u;
                u -= f / df;
            }
            assert!(
                (part.u_n[n] - u).abs() < 1e-10 * u,
                "n={n}: {} vs {u}",
                part.u_n[n]
            );
        }
    }

    #[test]
    fn decomposition_ratio_is_one_for_constants() {
        let w = RadialWeight::constant();
        let part = omega_partition(&w, 24).unwrap();
        let f = CoefficientSeries::from_real(&[2.0]);
        let r = decomposition_norm_check(2.0, &w, &part, &f).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }
}

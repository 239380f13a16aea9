//! Depth-doubling trend analysis.
//!
//! No finite computation proves an inequality for all r, so every divergence
//! verdict is a trichotomy: partial values are evaluated at geometrically
//! doubling ladder depths, growth by a sustained factor across the last three
//! refinements is declared divergence, increments below 1e-8 relative are
//! declared finiteness, and anything between stays Undecided.

/// Each of the last three level ratios must reach this factor for divergence.
pub const LEVEL_GROWTH: f64 = 1.7;
/// Consecutive level increments below this relative size mean finiteness.
pub const LEVEL_STABLE_REL: f64 = 1e-8;

/// Outcome of a partial-value scan (log-space values throughout).
#[derive(Debug, Clone, PartialEq)]
pub enum Trend {
    Finite { log_value: f64 },
    Divergent { level_slope: f64 },
    Undecided,
}

#[derive(Debug, Clone)]
pub struct LevelScan {
    /// (depth in octaves, log partial value)
    pub levels: Vec<(u32, f64)>,
    pub trend: Trend,
}

/// Depth schedule: max_octaves, halved repeatedly down to >= 2, ascending.
pub fn depth_schedule(max_octaves: u32) -> Vec<u32> {
    let mut ds = Vec::new();
    let mut d = max_octaves.max(2);
    while d >= 2 {
        ds.push(d);
        d /= 2;
    }
    ds.reverse();
    ds
}

/// Scan a monotone partial quantity (integral or series partial) whose log
/// value at a given ladder depth is produced by `partial_log`.
pub fn scan_levels<F: FnMut(u32) -> f64>(mut partial_log: F, max_octaves: u32) -> LevelScan {
    let mut levels: Vec<(u32, f64)> = Vec::new();
    for depth in depth_schedule(max_octaves) {
        let lp = partial_log(depth);
        levels.push((depth, lp));
        let n = levels.len();

        // finiteness: the last relative increment below threshold with the
        // one before it already small (increments of these monotone
        // quantities decay once converged)
        if n >= 3 {
            let inc = |i: usize| -> f64 {
                let prev = levels[i - 1].1;
                let cur = levels[i].1;
                if cur == f64::NEG_INFINITY {
                    0.0
                } else if prev == f64::NEG_INFINITY {
                    1.0
                } else {
                    1.0 - (prev - cur).exp()
                }
            };
            if inc(n - 1) < LEVEL_STABLE_REL && inc(n - 2) < LEVEL_STABLE_REL.sqrt() {
                return LevelScan {
                    trend: Trend::Finite { log_value: lp },
                    levels,
                };
            }
        }

        // divergence: the last three per-doubling slopes must all clear the
        // growth factor and their limit must stay above it. Slowly
        // convergent partials mimic harmonic growth at shallow depth
        // (1 - 2^{-εD} doubles while εD is small), but their slope
        // decrements grow or decay geometrically to a zero limit, while
        // genuine log/power divergence has flat, rising, or
        // positive-limit slopes.
        if n >= 4 {
            let slope = |i: usize| -> f64 {
                let dl = levels[i].1 - levels[i - 1].1;
                let dd = (levels[i].0 as f64 / levels[i - 1].0 as f64).ln();
                dl * std::f64::consts::LN_2 / dd
            };
            let lg = LEVEL_GROWTH.ln();
            let (s1, s2, s3) = (slope(n - 3), slope(n - 2), slope(n - 1));
            let above = s1 >= lg && s2 >= lg && s3 >= lg;
            let diverges = above
                && if s2 <= s3 + 1e-9 && s1 <= s2 + 1e-9 {
                    true
                } else {
                    let (d2, d3) = (s1 - s2, s2 - s3);
                    if d2 > 0.0 && d3 > 0.0 && d3 <= 0.7 * d2 {
                        let rho = d3 / d2;
                        s3 - d3 * rho / (1.0 - rho) >= lg
                    } else {
                        false
                    }
                };
            if diverges {
                let s = (levels[n - 1].1 - levels[n - 4].1) / 3.0;
                return LevelScan {
                    trend: Trend::Divergent { level_slope: s },
                    levels,
                };
            }
        }
    }
    LevelScan {
        trend: Trend::Undecided,
        levels,
    }
}

/// Limsup classification for pointwise samples near the boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum Limsup {
    Zero,
    Positive { log_value: f64 },
    Infinite { level_slope: f64 },
    Undecided,
}

#[derive(Debug, Clone)]
pub struct SupScan {
    /// (depth, log running max)
    pub sup_levels: Vec<(u32, f64)>,
    /// (depth, log max over the tail third of the ladder)
    pub tail_levels: Vec<(u32, f64)>,
    pub sup: Trend,
    pub limsup: Limsup,
    /// sampled (u, log value) pairs at the deepest evaluated level
    pub samples: Vec<(f64, f64)>,
}

/// Scan sup/limsup of a pointwise quantity S(u) sampled on the geometric
/// ladder u = 2^{-j/q}. `log_sample` receives ln u.
pub fn scan_sup<F: Fn(f64) -> f64>(log_sample: F, q: u32, max_octaves: u32) -> SupScan {
    let q = q.max(1);
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut sup_levels: Vec<(u32, f64)> = Vec::new();
    let mut tail_levels: Vec<(u32, f64)> = Vec::new();
    let mut next_j = 0u32;
    let mut sup = Trend::Undecided;
    let mut limsup = Limsup::Undecided;

    for depth in depth_schedule(max_octaves) {
        let j_max = depth * q;
        while next_j <= j_max {
            let ln_u = -(next_j as f64 / q as f64) * std::f64::consts::LN_2;
            samples.push((ln_u.exp(), log_sample(ln_u)));
            next_j += 1;
        }
        let running_max = samples
            .iter()
            .map(|s| s.1)
            .fold(f64::NEG_INFINITY, f64::max);
        let tail_start = samples.len() - (samples.len() / 3).max(1);
        let tail_max = samples[tail_start..]
            .iter()
            .map(|s| s.1)
            .fold(f64::NEG_INFINITY, f64::max);
        sup_levels.push((depth, running_max));
        tail_levels.push((depth, tail_max));

        let n = sup_levels.len();
        if n >= 4 && matches!(sup, Trend::Undecided) {
            let lg = LEVEL_GROWTH.ln();
            if (n - 3..n).all(|i| sup_levels[i].1 - sup_levels[i - 1].1 >= lg) {
                sup = Trend::Divergent {
                    level_slope: (sup_levels[n - 1].1 - sup_levels[n - 4].1) / 3.0,
                };
            }
        }
        if n >= 3 && matches!(sup, Trend::Undecided) {
            let stable = (n - 2..n).all(|i| {
                let inc = sup_levels[i].1 - sup_levels[i - 1].1;
                inc < LEVEL_STABLE_REL
            });
            if stable {
                sup = Trend::Finite {
                    log_value: running_max,
                };
            }
        }

        if n >= 4 && matches!(limsup, Limsup::Undecided) {
            let lg = LEVEL_GROWTH.ln();
            if (n - 3..n).all(|i| tail_levels[i].1 - tail_levels[i - 1].1 >= lg) {
                limsup = Limsup::Infinite {
                    level_slope: (tail_levels[n - 1].1 - tail_levels[n - 4].1) / 3.0,
                };
            } else if (n - 3..n).all(|i| tail_levels[i].1 - tail_levels[i - 1].1 <= 0.7f64.ln())
                && tail_max < running_max - 6.0 * std::f64::consts::LN_10
            {
                limsup = Limsup::Zero;
            } else if (n - 2..n).all(|i| (tail_levels[i].1 - tail_levels[i - 1].1).abs() < 1e-2) {
                limsup = Limsup::Positive {
                    log_value: tail_max,
                };
            }
        }

        if !matches!(sup, Trend::Undecided) && !matches!(limsup, Limsup::Undecided) {
            break;
        }
    }

    SupScan {
        sup_levels,
        tail_levels,
        sup,
        limsup,
        samples,
    }
}

/// Least-squares line fit y = slope*x + b; returns (slope, intercept, max |residual|).
pub fn fit_line(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    assert!(points.len() >= 2);
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let max_resid = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).abs())
        .fold(0.0, f64::max);
    (slope, intercept, max_resid)
}

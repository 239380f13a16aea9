//! The fixed weight registry used by sweeps and the verification suites.

use crate::classify;
use crate::weight::{RadialWeight, Tabulated, WeightKind};

/// Tabulated sample of the weight 1-r on a log-spaced grid up to r = 0.9999.
pub fn tabulated_sample() -> RadialWeight {
    let n = 65;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            // u log-spaced from 1 down to 1e-4
            let u = 10f64.powf(-4.0 * i as f64 / (n - 1) as f64);
            (1.0 - u, u)
        })
        .collect();
    RadialWeight::new(WeightKind::Tabulated(
        Tabulated::from_samples(samples).expect("valid sample table"),
    ))
    .expect("valid tabulated weight")
}

/// Every registry weight, in a fixed order.
pub fn registry() -> Vec<RadialWeight> {
    vec![
        RadialWeight::constant(),
        RadialWeight::standard(1.0, false).unwrap(),
        RadialWeight::standard(-0.5, false).unwrap(),
        RadialWeight::standard(3.0, false).unwrap(),
        RadialWeight::standard(1.0, true).unwrap(),
        RadialWeight::new(WeightKind::LogPower { a: -1.0, b: -2.0 }).unwrap(),
        RadialWeight::new(WeightKind::Oscillating {
            base: RadialWeight::standard(1.0, false).unwrap(),
            amplitude: 0.5,
            period: 2.0,
        })
        .unwrap(),
        tabulated_sample(),
        RadialWeight::new(WeightKind::Exponential { c: 1.0, gamma: 1.0 }).unwrap(),
    ]
}

/// The registry weights whose upper-doubling membership the classifier
/// verifies (trend-based).
pub fn registry_dhat() -> Vec<RadialWeight> {
    registry().into_iter().filter(classify::is_dhat).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dhat_subset_is_everything_but_exponential() {
        let all = registry();
        let dhat = registry_dhat();
        assert_eq!(all.len(), 9);
        assert_eq!(
            dhat.len(),
            8,
            "{:?}",
            dhat.iter()
                .map(|w| w.spec().to_string())
                .collect::<Vec<_>>()
        );
        assert!(dhat.iter().all(|w| !w.spec().starts_with("exp:")));
    }
}

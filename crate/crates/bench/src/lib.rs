//! Shared fixtures for the criterion benches.

use volterra_core::poly::CoefficientSeries;
use volterra_core::weight::RadialWeight;

pub fn bench_weight() -> RadialWeight {
    RadialWeight::standard(1.0, false).unwrap()
}

pub fn bench_poly(deg: usize) -> CoefficientSeries {
    CoefficientSeries::from_real(
        &(0..=deg)
            .map(|k| 1.0 / (k as f64 + 1.0))
            .collect::<Vec<_>>(),
    )
}

//! Numerical calculus of radial weights on the unit disc and the
//! boundedness/compactness criteria for Volterra-type operators
//! T_g f(z) = ∫_0^z f g' mapping weighted Dirichlet-type spaces into H^∞.
//!
//! Module map:
//! - [`weight`]: radial weights, tails ω̂, moments ω_x, derived weights
//! - [`classify`]: doubling-class membership (D̂, Ď, D) and Lemma-type exponents
//! - [`poly`]: finite Maclaurin coefficient series
//! - [`spaces`]: norms and pairings (H^p, A^p_ω, D^p_ω, HL^ω_p, Zygmund, Bloch, BMOA)
//! - [`kernels`]: reproducing kernels of weighted D² spaces and dual test functions
//! - [`criteria`]: triviality/boundedness/compactness criteria with verdicts
//! - [`dyadic`]: dyadic and weight-generated block decompositions
//! - [`volterra`]: the operator itself and empirical operator-norm lower bounds
//! - [`report`]: serializable report types shared with the CLI

pub mod classify;
pub mod criteria;
pub mod dyadic;
pub mod error;
pub mod fft;
pub mod kernels;
pub mod parse;
pub mod poly;
pub mod quad;
pub mod registry;
pub mod report;
pub mod rng;
pub mod spaces;
pub mod special;
pub mod trend;
pub mod volterra;
pub mod weight;

pub use error::{Error, Result};
pub use poly::CoefficientSeries;
pub use quad::{Qty, QuadSettings};
pub use report::{ClassReport, CriterionReport, RatioSweep, Verdict};
pub use weight::{DerivedKind, RadialWeight, WeightKind};

//! Serializable report types shared by the criteria modules and the CLI.

use serde::Serialize;

/// Verdict vocabulary for criterion reports.
///
/// `Unbounded` complements `Bounded` for single-symbol criteria whose series
/// diverges; `Unsupported` flags hypotheses the weight does not meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    TrivialOnly,
    Nontrivial,
    Bounded,
    Unbounded,
    Compact,
    NotCompact,
    Inconclusive,
    Unsupported,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limsup_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

/// One grid sample. For boundary ladders `at` is u = 1 - r, which stays
/// meaningful at depths where r itself rounds to 1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sample {
    pub at: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ParamRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<Vec<(String, String)>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub params: ParamRecord,
    pub samples: Vec<Sample>,
    pub summary: Summary,
    pub verdict: Verdict,
    /// Companion verdict for the compact-operator question where the
    /// criterion distinguishes it from boundedness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compact_verdict: Option<Verdict>,
    pub warnings: Vec<String>,
}

impl CriterionReport {
    pub fn new(criterion: impl Into<String>) -> Self {
        CriterionReport {
            criterion: criterion.into(),
            params: ParamRecord::default(),
            samples: Vec::new(),
            summary: Summary::default(),
            verdict: Verdict::Inconclusive,
            compact_verdict: None,
            warnings: Vec::new(),
        }
    }
}

/// Paired LHS/RHS evaluations of a claimed two-sided asymptotic.
#[derive(Debug, Clone, Serialize)]
pub struct RatioPair {
    pub at: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioSweep {
    pub label: String,
    pub pairs: Vec<RatioPair>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl RatioSweep {
    pub fn from_pairs(label: impl Into<String>, pairs: Vec<RatioPair>) -> Self {
        let min_ratio = pairs.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
        let max_ratio = pairs
            .iter()
            .map(|p| p.ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        RatioSweep {
            label: label.into(),
            pairs,
            min_ratio,
            max_ratio,
        }
    }

    /// max/min spread of the ratios; the two-sidedness figure of merit.
    pub fn band(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub verdict: Membership,
    /// Best constant observed over the grid (max ratio for D̂, min for Ď).
    pub best_c: f64,
    /// Log-growth of the extremal ratio per depth-doubling; ~0 when bounded.
    pub growth_slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DcheckReport {
    pub verdict: Membership,
    /// K values tested and their per-K outcome.
    pub tested: Vec<(f64, MembershipReport)>,
    /// Best (largest) constant among member K's.
    pub best_c: Option<f64>,
    pub best_k: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub weight: String,
    pub dhat: MembershipReport,
    pub dcheck: DcheckReport,
    /// D = D̂ ∩ Ď when both sides are decided.
    pub d_member: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_c: Option<f64>,
    pub grid_refinement: u32,
    pub grid_depth: u32,
    pub warnings: Vec<String>,
}

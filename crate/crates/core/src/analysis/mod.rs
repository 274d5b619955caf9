//! Monte Carlo checks of the integral identities of the two-species Gibbs
//! measure, and correlation-function estimators.
//!
//! Every check forms one left-hand and one right-hand summand per sample,
//! computed in parallel with sample `i` drawing from child stream `i` of the
//! caller's generator, and reduced in sample order. The z-score uses the
//! standard error of the per-sample differences.

mod algebraic;
mod campbell_mecke;
mod correlation;
mod ruelle;
mod test_function;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stats::{z_score, EstimateWithError};

pub use algebraic::{
    check_balance, check_cocycle, check_pair_product, log_discrepancy, AlgebraicReport,
    ALGEBRAIC_TOL,
};
pub use campbell_mecke::{verify_cm_full, verify_cm_minus, verify_cm_plus};
pub use correlation::{
    correlation_summands, estimate_correlation, estimate_marginal_correlation,
    marginal_correlation_summands,
};
pub use ruelle::{check_ruelle_bound, verify_ruelle, RuelleBoundEntry, RuelleBoundReport};
pub use test_function::{Arity, TestFunction};

/// Pass threshold on `|z|`.
pub const Z_THRESHOLD: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub test_function: String,
    pub lhs: EstimateWithError,
    pub rhs: EstimateWithError,
    /// Standard error of the per-sample differences.
    pub pooled_std_err: f64,
    pub z_score: f64,
    pub pass: bool,
    /// Fewer than two samples; the z-score carries no information.
    pub degenerate: bool,
    pub attempts: u32,
}

impl IdentityReport {
    /// Builds a report from paired per-sample summands.
    pub fn from_pairs(identity: &str, test_function: &str, pairs: &[(f64, f64)]) -> Result<Self> {
        let lhs_v: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let rhs_v: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let diff_v: Vec<f64> = pairs.iter().map(|p| p.0 - p.1).collect();
        let lhs = EstimateWithError::from_values(&lhs_v)?;
        let rhs = EstimateWithError::from_values(&rhs_v)?;
        let diff = EstimateWithError::from_values(&diff_v)?;
        let z = z_score(lhs.estimate, rhs.estimate, diff.std_err);
        let degenerate = diff.is_degenerate();
        Ok(IdentityReport {
            identity: identity.to_string(),
            test_function: test_function.to_string(),
            lhs,
            rhs,
            pooled_std_err: diff.std_err,
            z_score: z,
            pass: !degenerate && z.abs() < Z_THRESHOLD,
            degenerate,
            attempts: 1,
        })
    }
}

/// Runs `check(0)`; if it fails, runs `check(1)` once more and keeps that
/// report. The attempt index is meant to select a fresh seed.
pub fn with_retry<F>(check: F) -> Result<IdentityReport>
where
    F: Fn(u32) -> Result<IdentityReport>,
{
    let first = check(0)?;
    if first.pass {
        return Ok(first);
    }
    let mut second = check(1)?;
    second.attempts = 2;
    Ok(second)
}

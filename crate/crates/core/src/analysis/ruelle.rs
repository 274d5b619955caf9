use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{correlation_summands, Arity, IdentityReport, TestFunction};
use crate::configuration::{Configuration, TwoComponentConfiguration, Window};
use crate::energy::{log_telescoped_parts, PotentialModel};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::stats::EstimateWithError;

/// Ruelle-type decomposition over subwindows `Δ⁺`, `Δ⁻`:
///
/// ```text
/// E F(γ) = E[ 1{γ⁺ ∩ Δ⁺ = ∅, γ⁻ ∩ Δ⁻ = ∅}
///             ∫∫ F(γ ∪ η) R(γ, η⁺, η⁻) dλ(η⁺) dλ(η⁻) ]
/// ```
///
/// with `η± ⊂ Δ±` under the Lebesgue–Poisson measure. The inner integral is
/// `e^{σ(Δ⁺)+σ(Δ⁻)}` times a Poisson expectation, estimated with `n_inner`
/// draws per sample.
#[allow(clippy::too_many_arguments)]
pub fn verify_ruelle(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    window: &Window,
    sub_plus: &Window,
    sub_minus: &Window,
    f: &TestFunction,
    n_inner: usize,
    rng: &RngState,
) -> Result<IdentityReport> {
    f.expect_arity(Arity::Configuration)?;
    if !window.contains_window(sub_plus) || !window.contains_window(sub_minus) {
        return Err(Error::SubwindowNotContained);
    }
    let k = n_inner.max(1);
    let log_weight = m.intensity.mass(sub_plus) + m.intensity.mass(sub_minus);
    let pairs: Vec<(f64, f64)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let (plus, minus) = (g.plus.points(), g.minus.points());
            let lhs = f.eval_config(&[plus], &[minus]);
            let outside = plus.iter().all(|x| !sub_plus.contains(x))
                && minus.iter().all(|y| !sub_minus.contains(y));
            if !outside {
                return Ok((lhs, 0.0));
            }
            let mut rng = rng.fork(i as u64);
            let mut acc = 0.0;
            for _ in 0..k {
                let eta_plus = m.intensity.sample_poisson(sub_plus, &mut rng);
                let eta_minus = m.intensity.sample_poisson(sub_minus, &mut rng);
                let log_r = match log_telescoped_parts(
                    m,
                    &[plus],
                    &[minus],
                    eta_plus.points(),
                    eta_minus.points(),
                ) {
                    Ok(v) => v,
                    // cross coincidence between the two draws, probability zero
                    Err(Error::CoincidentPoint(_)) => continue,
                    Err(e) => return Err(e),
                };
                if log_r == f64::NEG_INFINITY {
                    continue;
                }
                let value = f.eval_config(&[plus, eta_plus.points()], &[minus, eta_minus.points()]);
                acc += value * (log_r + log_weight).exp();
            }
            Ok((lhs, acc / k as f64))
        })
        .collect::<Result<_>>()?;
    IdentityReport::from_pairs("ruelle", f.id(), &pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuelleBoundEntry {
    pub eta_plus: Configuration,
    pub eta_minus: Configuration,
    pub estimate: EstimateWithError,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuelleBoundReport {
    pub entries: Vec<RuelleBoundEntry>,
    pub pass: bool,
}

/// Checks `k̂(η⁺, η⁻) ≤ e^{2σ(Λ)} + 3·stderr` for each `η` in `catalogue`,
/// the local bound with constant 1 that holds for non-negative potentials.
pub fn check_ruelle_bound(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    window: &Window,
    catalogue: &[(Configuration, Configuration)],
) -> Result<RuelleBoundReport> {
    if !m.is_nonnegative() {
        return Err(Error::NotNonnegativeModel);
    }
    let bound = (2.0 * m.intensity.mass(window)).exp();
    let entries = catalogue
        .iter()
        .map(|(ep, em)| {
            let values = correlation_summands(samples, m, ep, em)?;
            let estimate = EstimateWithError::from_values(&values)?;
            Ok(RuelleBoundEntry {
                eta_plus: ep.clone(),
                eta_minus: em.clone(),
                estimate,
                bound,
                pass: estimate.estimate <= bound + 3.0 * estimate.std_err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = entries.iter().all(|e| e.pass);
    Ok(RuelleBoundReport { entries, pass })
}

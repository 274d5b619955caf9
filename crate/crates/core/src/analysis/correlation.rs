use rayon::prelude::*;

use crate::configuration::{Configuration, TwoComponentConfiguration};
use crate::energy::{log_telescoped_parts, log_telescoped_plus_parts, PotentialModel};
use crate::error::Result;
use crate::stats::EstimateWithError;

/// Per-sample values `R(γ, η⁺, η⁻)`.
pub fn correlation_summands(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    eta_plus: &Configuration,
    eta_minus: &Configuration,
) -> Result<Vec<f64>> {
    samples
        .par_iter()
        .map(|g| {
            log_telescoped_parts(
                m,
                &[g.plus.points()],
                &[g.minus.points()],
                eta_plus.points(),
                eta_minus.points(),
            )
            .map(f64::exp)
        })
        .collect()
}

/// Per-sample values `R⁺(γ, η⁺)`.
pub fn marginal_correlation_summands(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    eta_plus: &Configuration,
) -> Result<Vec<f64>> {
    samples
        .par_iter()
        .map(|g| {
            log_telescoped_plus_parts(
                m,
                &[g.plus.points()],
                &[g.minus.points()],
                eta_plus.points(),
            )
            .map(f64::exp)
        })
        .collect()
}

/// `k̂(η⁺, η⁻) = mean R(γ, η⁺, η⁻)` over the samples. `k̂(∅, ∅) = 1` with
/// zero error.
pub fn estimate_correlation(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    eta_plus: &Configuration,
    eta_minus: &Configuration,
) -> Result<EstimateWithError> {
    let values = correlation_summands(samples, m, eta_plus, eta_minus)?;
    if eta_plus.is_empty() && eta_minus.is_empty() && !values.is_empty() {
        return Ok(EstimateWithError::exact(1.0, values.len()));
    }
    EstimateWithError::from_values(&values)
}

/// `k̂⁺(η⁺) = mean R⁺(γ, η⁺)`; coincides with `k̂(η⁺, ∅)`.
pub fn estimate_marginal_correlation(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    eta_plus: &Configuration,
) -> Result<EstimateWithError> {
    let values = marginal_correlation_summands(samples, m, eta_plus)?;
    if eta_plus.is_empty() && !values.is_empty() {
        return Ok(EstimateWithError::exact(1.0, values.len()));
    }
    EstimateWithError::from_values(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::Point;
    use crate::energy::PairPotential;
    use crate::error::Error;
    use crate::intensity::IntensityMeasure;

    fn conf(pts: &[[f64; 2]]) -> Configuration {
        Configuration::from_points(pts.iter().map(|&p| Point::from_array(p)).collect()).unwrap()
    }

    fn model() -> PotentialModel {
        PotentialModel::new(
            PairPotential::step(1.0, 0.3).unwrap(),
            PairPotential::step(0.5, 0.2).unwrap(),
            PairPotential::None,
            IntensityMeasure::homogeneous(1.0).unwrap(),
        )
    }

    #[test]
    fn empty_eta_is_exactly_one() {
        let s = vec![
            TwoComponentConfiguration::new(conf(&[[0.1, 0.1]]), conf(&[[0.2, 0.1]])).unwrap(),
            TwoComponentConfiguration::empty(),
        ];
        let e = estimate_correlation(
            &s,
            &model(),
            &Configuration::empty(),
            &Configuration::empty(),
        )
        .unwrap();
        assert_eq!((e.estimate, e.std_err, e.n_samples), (1.0, 0.0, 2));
    }

    #[test]
    fn marginal_matches_joint_per_sample() {
        let s = vec![TwoComponentConfiguration::new(
            conf(&[[0.1, 0.1], [0.7, 0.7]]),
            conf(&[[0.2, 0.1]]),
        )
        .unwrap()];
        let eta = conf(&[[0.15, 0.1], [0.8, 0.75]]);
        let a = correlation_summands(&s, &model(), &eta, &Configuration::empty()).unwrap();
        let b = marginal_correlation_summands(&s, &model(), &eta).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coincident_eta_is_an_error() {
        let s = vec![TwoComponentConfiguration::empty()];
        let r = estimate_correlation(&s, &model(), &conf(&[[0.5, 0.5]]), &conf(&[[0.5, 0.5]]));
        assert!(matches!(r, Err(Error::CoincidentPoint(_))));
    }
}

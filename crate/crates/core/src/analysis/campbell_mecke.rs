use rayon::prelude::*;

use super::{Arity, IdentityReport, TestFunction};
use crate::configuration::{Point, TwoComponentConfiguration, Window};
use crate::energy::{log_relative_minus_parts, log_relative_plus_parts, PotentialModel};
use crate::error::Result;
use crate::rng::RngState;
use crate::sampler::Species;

/// Draws `x` from σ on `w` until it avoids every point of `layers`.
fn fresh_point(
    m: &PotentialModel,
    w: &Window,
    layers: &[&[Point]],
    rng: &mut RngState,
) -> (Point, f64) {
    loop {
        let (x, wx) = m.intensity.draw_sigma_point(w, rng);
        if layers.iter().all(|l| l.iter().all(|p| p != &x)) {
            return (x, wx);
        }
    }
}

fn cm_single(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    w: &Window,
    h: &TestFunction,
    n_sigma_points: usize,
    rng: &RngState,
    species: Species,
) -> Result<IdentityReport> {
    h.expect_arity(Arity::PointMarked)?;
    let k = n_sigma_points.max(1);
    let pairs: Vec<(f64, f64)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = rng.fork(i as u64);
            let (own, other) = match species {
                Species::Plus => (g.plus.points(), g.minus.points()),
                Species::Minus => (g.minus.points(), g.plus.points()),
            };
            let lhs: f64 = own.iter().map(|x| h.eval_point(&[own], &[other], x)).sum();
            let mut rhs = 0.0;
            for _ in 0..k {
                let (x, wx) = fresh_point(m, w, &[own, other], &mut rng);
                let log_r = match species {
                    Species::Plus => log_relative_plus_parts(m, &[own], &[other], &x)?,
                    Species::Minus => log_relative_minus_parts(m, &[other], &[own], &x)?,
                };
                if log_r == f64::NEG_INFINITY {
                    continue;
                }
                let one = std::slice::from_ref(&x);
                rhs += wx * h.eval_point(&[own, one], &[other], &x) * log_r.exp();
            }
            Ok((lhs, rhs / k as f64))
        })
        .collect::<Result<_>>()?;
    let name = match species {
        Species::Plus => "cm-plus",
        Species::Minus => "cm-minus",
    };
    IdentityReport::from_pairs(name, h.id(), &pairs)
}

/// Single-point Campbell–Mecke identity for the plus species:
/// `E Σ_{x∈γ⁺} h(γ, x) = E ∫ h(γ⁺ ∪ x, γ⁻, x) r⁺(γ, x) dσ(x)`.
///
/// The σ-integral over `window` uses `n_sigma_points` fresh draws per
/// sample. `samples` are configurations of the finite-volume measure on
/// `window` with empty boundary.
pub fn verify_cm_plus(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    window: &Window,
    h: &TestFunction,
    n_sigma_points: usize,
    rng: &RngState,
) -> Result<IdentityReport> {
    cm_single(samples, m, window, h, n_sigma_points, rng, Species::Plus)
}

/// Mirror of [`verify_cm_plus`] for the minus species.
pub fn verify_cm_minus(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    window: &Window,
    h: &TestFunction,
    n_sigma_points: usize,
    rng: &RngState,
) -> Result<IdentityReport> {
    cm_single(samples, m, window, h, n_sigma_points, rng, Species::Minus)
}

/// Joint identity
/// `E Σ_{x∈γ⁺} Σ_{y∈γ⁻} h(γ, x, y) = E ∫∫ h(γ⁺ ∪ x, γ⁻ ∪ y, x, y) r(γ, x, y) dσ(x) dσ(y)`.
pub fn verify_cm_full(
    samples: &[TwoComponentConfiguration],
    m: &PotentialModel,
    window: &Window,
    h: &TestFunction,
    n_sigma_points: usize,
    rng: &RngState,
) -> Result<IdentityReport> {
    h.expect_arity(Arity::PairMarked)?;
    let k = n_sigma_points.max(1);
    let pairs: Vec<(f64, f64)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = rng.fork(i as u64);
            let (plus, minus) = (g.plus.points(), g.minus.points());
            let mut lhs = 0.0;
            for x in plus {
                for y in minus {
                    lhs += h.eval_pair(&[plus], &[minus], x, y);
                }
            }
            let mut rhs = 0.0;
            for _ in 0..k {
                let (x, wx) = fresh_point(m, window, &[plus, minus], &mut rng);
                let xs = std::slice::from_ref(&x);
                let (y, wy) = fresh_point(m, window, &[plus, minus, xs], &mut rng);
                let ys = std::slice::from_ref(&y);
                // r(γ, x, y) = r⁺(γ⁺, γ⁻ ∪ y, x) · r⁻(γ, y)
                let log_r = log_relative_plus_parts(m, &[plus], &[minus, ys], &x)?
                    + log_relative_minus_parts(m, &[plus], &[minus], &y)?;
                if log_r == f64::NEG_INFINITY {
                    continue;
                }
                rhs += wx * wy * h.eval_pair(&[plus, xs], &[minus, ys], &x, &y) * log_r.exp();
            }
            Ok((lhs, rhs / k as f64))
        })
        .collect::<Result<_>>()?;
    IdentityReport::from_pairs("cm-full", h.id(), &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::Configuration;
    use crate::error::Error;
    use crate::intensity::IntensityMeasure;

    #[test]
    fn single_empty_sample_is_degenerate() {
        let m = PotentialModel::free(IntensityMeasure::homogeneous(1.0).unwrap());
        let w = Window::unit(2);
        let h = TestFunction::InWindow { window: w.clone() };
        let r = verify_cm_plus(
            &[TwoComponentConfiguration::empty()],
            &m,
            &w,
            &h,
            10,
            &RngState::new(0, 0),
        )
        .unwrap();
        assert_eq!(r.lhs.estimate, 0.0);
        assert!(r.rhs.estimate >= 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn wrong_arity() {
        let m = PotentialModel::free(IntensityMeasure::homogeneous(1.0).unwrap());
        let w = Window::unit(2);
        let s = [TwoComponentConfiguration::new(
            Configuration::from_points(vec![Point::from_array([0.5, 0.5])]).unwrap(),
            Configuration::empty(),
        )
        .unwrap()];
        let rng = RngState::new(0, 0);
        assert!(matches!(
            verify_cm_plus(&s, &m, &w, &TestFunction::One, 1, &rng),
            Err(Error::WrongArity { .. })
        ));
        assert!(verify_cm_full(
            &s,
            &m,
            &w,
            &TestFunction::PairWithin { range: 0.1 },
            1,
            &rng
        )
        .is_ok());
        assert!(matches!(
            verify_cm_full(
                &s,
                &m,
                &w,
                &TestFunction::CrossContact { range: 0.1 },
                1,
                &rng
            ),
            Err(Error::WrongArity { .. })
        ));
    }
}

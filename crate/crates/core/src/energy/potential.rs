use crate::configuration::Point;
use crate::error::{Error, Result};
use crate::intensity::IntensityMeasure;

/// Isotropic pair potential `φ(x, y) = v(|x − y|)`, possibly `+∞` (hard core).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairPotential {
    /// `φ ≡ 0`.
    None,
    /// `a · 1{|x − y| ≤ ρ}`; `a = +∞` behaves like a hard core.
    Step { amplitude: f64, range: f64 },
    /// `+∞ · 1{|x − y| ≤ ρ}`.
    HardCore { range: f64 },
    /// `a · (ρ / |x − y|)^κ` for `|x − y| ≤ ρ`, zero beyond.
    SoftCore {
        amplitude: f64,
        range: f64,
        exponent: f64,
    },
}

impl PairPotential {
    pub fn step(amplitude: f64, range: f64) -> Result<Self> {
        check_range(range)?;
        if amplitude.is_nan() || amplitude == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!(
                "step amplitude must be a real number or +inf, got {amplitude}"
            )));
        }
        Ok(PairPotential::Step { amplitude, range })
    }

    pub fn hard_core(range: f64) -> Result<Self> {
        check_range(range)?;
        Ok(PairPotential::HardCore { range })
    }

    /// Soft-core amplitudes must be finite and non-negative: a negative
    /// amplitude diverges to `−∞` at short distance and no finite-volume
    /// density exists.
    pub fn soft_core(amplitude: f64, range: f64, exponent: f64) -> Result<Self> {
        check_range(range)?;
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "soft-core amplitude must be finite and non-negative, got {amplitude}"
            )));
        }
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "soft-core exponent must be positive, got {exponent}"
            )));
        }
        Ok(PairPotential::SoftCore {
            amplitude,
            range,
            exponent,
        })
    }

    /// Interaction range, `None` for the zero potential.
    pub fn range(&self) -> Option<f64> {
        match *self {
            PairPotential::None => None,
            PairPotential::Step { range, .. }
            | PairPotential::HardCore { range }
            | PairPotential::SoftCore { range, .. } => Some(range),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match *self {
            PairPotential::None | PairPotential::HardCore { .. } => true,
            PairPotential::Step { amplitude, .. } | PairPotential::SoftCore { amplitude, .. } => {
                amplitude >= 0.0
            }
        }
    }

    /// Value at squared distance `d2 > 0`.
    #[inline]
    pub fn at_dist2(&self, d2: f64) -> f64 {
        match *self {
            PairPotential::None => 0.0,
            PairPotential::Step { amplitude, range } => {
                if d2 <= range * range {
                    amplitude
                } else {
                    0.0
                }
            }
            PairPotential::HardCore { range } => {
                if d2 <= range * range {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            PairPotential::SoftCore {
                amplitude,
                range,
                exponent,
            } => {
                if d2 <= range * range {
                    if amplitude == 0.0 {
                        0.0
                    } else {
                        amplitude * (range * range / d2).powf(0.5 * exponent)
                    }
                } else {
                    0.0
                }
            }
        }
    }

    pub fn value(&self, x: &Point, y: &Point) -> f64 {
        self.at_dist2(x.dist2(y))
    }

    /// True if the pair at squared distance `d2` is forbidden (`φ = +∞`).
    pub fn forbids(&self, d2: f64) -> bool {
        self.at_dist2(d2) == f64::INFINITY
    }
}

fn check_range(range: f64) -> Result<()> {
    if !(range > 0.0) || !range.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "interaction range must be positive and finite, got {range}"
        )));
    }
    Ok(())
}

/// Cross potential `φ`, self potentials `φ⁺`, `φ⁻` and the intensity σ.
#[derive(Debug, Clone)]
pub struct PotentialModel {
    pub cross: PairPotential,
    pub self_plus: PairPotential,
    pub self_minus: PairPotential,
    pub intensity: IntensityMeasure,
}

impl PotentialModel {
    pub fn new(
        cross: PairPotential,
        self_plus: PairPotential,
        self_minus: PairPotential,
        intensity: IntensityMeasure,
    ) -> Self {
        PotentialModel {
            cross,
            self_plus,
            self_minus,
            intensity,
        }
    }

    /// No interactions: the product of two Poisson processes.
    pub fn free(intensity: IntensityMeasure) -> Self {
        Self::new(
            PairPotential::None,
            PairPotential::None,
            PairPotential::None,
            intensity,
        )
    }

    /// All amplitudes non-negative, so every density `R(∅, η⁺, η⁻) ≤ 1`.
    pub fn is_nonnegative(&self) -> bool {
        self.cross.is_nonnegative()
            && self.self_plus.is_nonnegative()
            && self.self_minus.is_nonnegative()
    }

    /// Same model with the species labels exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(
            self.cross,
            self.self_minus,
            self.self_plus,
            self.intensity.clone(),
        )
    }

    pub fn max_range(&self) -> Option<f64> {
        [self.cross, self.self_plus, self.self_minus]
            .iter()
            .filter_map(PairPotential::range)
            .reduce(f64::max)
    }
}

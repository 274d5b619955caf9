//! Relative energy densities of the two-species pair-potential family.
//!
//! For a configuration `γ = (γ⁺, γ⁻)` the single-point densities are
//!
//! ```text
//! r⁺(γ, x) = exp{ −Σ_{y∈γ⁻} φ(x, y) − Σ_{x'∈γ⁺} φ⁺(x, x') }
//! r⁻(γ, y) = exp{ −Σ_{x∈γ⁺} φ(x, y) − Σ_{y'∈γ⁻} φ⁻(y, y') }
//! ```
//!
//! and `r(γ, x, y) = r⁺(γ⁺, γ⁻ ∪ y, x) · r⁻(γ, y)` adds one point of each
//! species. The multi-point densities `R⁺`, `R⁻` and `R` telescope these over
//! a finite configuration `η`, inserting its points one at a time.
//!
//! Everything is carried as a natural logarithm ([`LogDensity`]); a hard-core
//! violation gives `−∞`.
//!
//! The `*_parts` functions take each species as a list of slices, so callers
//! can add a frozen boundary or a prefix of `η` without copying points.

mod cells;
mod potential;

use std::ops::Mul;

pub use cells::CellList;
pub use potential::{PairPotential, PotentialModel};

use crate::configuration::{Configuration, Point, TwoComponentConfiguration};
use crate::error::{Error, Result};

/// Tolerance used by the debug-build cross-checks of the two factorizations.
const FACTORIZATION_TOL: f64 = 1e-12;

/// Logarithm of a non-negative density; `−∞` encodes zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogDensity(f64);

impl LogDensity {
    pub const ONE: LogDensity = LogDensity(0.0);
    pub const ZERO: LogDensity = LogDensity(f64::NEG_INFINITY);

    pub fn from_log(log: f64) -> Self {
        debug_assert!(
            !log.is_nan() && log != f64::INFINITY,
            "bad log density {log}"
        );
        LogDensity(log)
    }

    pub fn log(self) -> f64 {
        self.0
    }

    /// The density itself, `exp(log)`.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Both zero, or logs within `tol · max(1, |a|, |b|)`.
    pub fn approx_eq(self, other: LogDensity, tol: f64) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        let scale = 1.0f64.max(self.0.abs()).max(other.0.abs());
        (self.0 - other.0).abs() <= tol * scale
    }
}

impl Mul for LogDensity {
    type Output = LogDensity;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: LogDensity) -> LogDensity {
        LogDensity(self.0 + rhs.0)
    }
}

/// `Σ_{y∈c} φ(x, y)`, `+∞` on a hard-core violation.
pub fn phi_sum(p: &PairPotential, x: &Point, c: &Configuration) -> Result<f64> {
    phi_sum_parts(p, x, &[c.points()])
}

/// [`phi_sum`] over the union of several slices.
///
/// Every point is scanned, so a point coinciding with `x` is reported even
/// after a hard-core hit.
pub fn phi_sum_parts(p: &PairPotential, x: &Point, parts: &[&[Point]]) -> Result<f64> {
    let mut sum = 0.0;
    for part in parts {
        for y in part.iter() {
            let d2 = x.dist2(y);
            if d2 == 0.0 {
                return Err(Error::CoincidentPoint(x.coords().to_vec()));
            }
            sum += p.at_dist2(d2);
        }
    }
    Ok(sum)
}

/// `log r⁺` with each species given as slices.
pub fn log_relative_plus_parts(
    m: &PotentialModel,
    plus: &[&[Point]],
    minus: &[&[Point]],
    x: &Point,
) -> Result<f64> {
    let energy = phi_sum_parts(&m.cross, x, minus)? + phi_sum_parts(&m.self_plus, x, plus)?;
    Ok(-energy)
}

/// `log r⁻` with each species given as slices.
pub fn log_relative_minus_parts(
    m: &PotentialModel,
    plus: &[&[Point]],
    minus: &[&[Point]],
    y: &Point,
) -> Result<f64> {
    let energy = phi_sum_parts(&m.cross, y, plus)? + phi_sum_parts(&m.self_minus, y, minus)?;
    Ok(-energy)
}

/// `log R⁺(γ, η⁺)`: points of `eta` are inserted in slice order.
pub fn log_telescoped_plus_parts(
    m: &PotentialModel,
    plus: &[&[Point]],
    minus: &[&[Point]],
    eta: &[Point],
) -> Result<f64> {
    let mut layers: Vec<&[Point]> = plus.to_vec();
    layers.push(&[]);
    let last = layers.len() - 1;
    let mut total = 0.0;
    for (i, x) in eta.iter().enumerate() {
        layers[last] = &eta[..i];
        total += log_relative_plus_parts(m, &layers, minus, x)?;
    }
    Ok(total)
}

/// `log R⁻(γ, η⁻)`: points of `eta` are inserted in slice order.
pub fn log_telescoped_minus_parts(
    m: &PotentialModel,
    plus: &[&[Point]],
    minus: &[&[Point]],
    eta: &[Point],
) -> Result<f64> {
    let mut layers: Vec<&[Point]> = minus.to_vec();
    layers.push(&[]);
    let last = layers.len() - 1;
    let mut total = 0.0;
    for (i, y) in eta.iter().enumerate() {
        layers[last] = &eta[..i];
        total += log_relative_minus_parts(m, plus, &layers, y)?;
    }
    Ok(total)
}

/// `log R(γ, η⁺, η⁻) = log R⁺(γ⁺, γ⁻ ∪ η⁻, η⁺) + log R⁻(γ, η⁻)`.
pub fn log_telescoped_parts(
    m: &PotentialModel,
    plus: &[&[Point]],
    minus: &[&[Point]],
    eta_plus: &[Point],
    eta_minus: &[Point],
) -> Result<f64> {
    let mut minus_ext: Vec<&[Point]> = minus.to_vec();
    minus_ext.push(eta_minus);
    let first = log_telescoped_plus_parts(m, plus, &minus_ext, eta_plus)?;
    let second = log_telescoped_minus_parts(m, plus, minus, eta_minus)?;
    Ok(first + second)
}

fn split(g: &TwoComponentConfiguration) -> ([&[Point]; 1], [&[Point]; 1]) {
    ([g.plus.points()], [g.minus.points()])
}

/// `r⁺(γ⁺, γ⁻, x)`.
pub fn relative_plus(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    x: &Point,
) -> Result<LogDensity> {
    let (p, n) = split(g);
    log_relative_plus_parts(m, &p, &n, x).map(LogDensity::from_log)
}

/// `r⁻(γ⁺, γ⁻, y)`.
pub fn relative_minus(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    y: &Point,
) -> Result<LogDensity> {
    let (p, n) = split(g);
    log_relative_minus_parts(m, &p, &n, y).map(LogDensity::from_log)
}

/// `r(γ, x, y) = r⁺(γ⁺, γ⁻ ∪ y, x) · r⁻(γ⁺, γ⁻, y)`.
///
/// Debug builds also evaluate the other factorization
/// `r⁻(γ⁺ ∪ x, γ⁻, y) · r⁺(γ⁺, γ⁻, x)` and assert agreement.
pub fn relative_pair(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    x: &Point,
    y: &Point,
) -> Result<LogDensity> {
    if x == y {
        return Err(Error::CoincidentPoint(x.coords().to_vec()));
    }
    let y_slice = std::slice::from_ref(y);
    let plus = [g.plus.points()];
    let minus = [g.minus.points(), y_slice];
    let first = log_relative_plus_parts(m, &plus, &minus, x)?;
    let second = log_relative_minus_parts(m, &plus, &minus[..1], y)?;
    let value = LogDensity::from_log(first + second);
    debug_assert!(relative_pair_alt(m, g, x, y)
        .map(|alt| alt.approx_eq(value, FACTORIZATION_TOL))
        .unwrap_or(false));
    Ok(value)
}

/// `r(γ, x, y)` via `r⁻(γ⁺ ∪ x, γ⁻, y) · r⁺(γ⁺, γ⁻, x)`.
pub fn relative_pair_alt(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    x: &Point,
    y: &Point,
) -> Result<LogDensity> {
    if x == y {
        return Err(Error::CoincidentPoint(x.coords().to_vec()));
    }
    let x_slice = std::slice::from_ref(x);
    let plus = [g.plus.points(), x_slice];
    let minus = [g.minus.points()];
    let first = log_relative_minus_parts(m, &plus, &minus, y)?;
    let second = log_relative_plus_parts(m, &plus[..1], &minus, x)?;
    Ok(LogDensity::from_log(first + second))
}

/// `R⁺(γ⁺, γ⁻, η⁺)`; `R⁺(γ, ∅) = 1`.
pub fn telescoped_plus(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    eta: &Configuration,
) -> Result<LogDensity> {
    let (p, n) = split(g);
    log_telescoped_plus_parts(m, &p, &n, eta.points()).map(LogDensity::from_log)
}

/// `R⁻(γ⁺, γ⁻, η⁻)`; `R⁻(γ, ∅) = 1`.
pub fn telescoped_minus(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    eta: &Configuration,
) -> Result<LogDensity> {
    let (p, n) = split(g);
    log_telescoped_minus_parts(m, &p, &n, eta.points()).map(LogDensity::from_log)
}

/// `R(γ, η⁺, η⁻) = R⁺(γ⁺, γ⁻ ∪ η⁻, η⁺) · R⁻(γ⁺, γ⁻, η⁻)`.
///
/// Debug builds assert agreement with [`telescoped_alt`].
pub fn telescoped(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    eta_plus: &Configuration,
    eta_minus: &Configuration,
) -> Result<LogDensity> {
    let (p, n) = split(g);
    let value = log_telescoped_parts(m, &p, &n, eta_plus.points(), eta_minus.points())
        .map(LogDensity::from_log)?;
    debug_assert!(telescoped_alt(m, g, eta_plus, eta_minus)
        .map(|alt| alt.approx_eq(value, 1e-11))
        .unwrap_or(false));
    Ok(value)
}

/// `R(γ, η⁺, η⁻)` via `R⁻(γ⁺ ∪ η⁺, γ⁻, η⁻) · R⁺(γ⁺, γ⁻, η⁺)`.
pub fn telescoped_alt(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    eta_plus: &Configuration,
    eta_minus: &Configuration,
) -> Result<LogDensity> {
    let plus = [g.plus.points(), eta_plus.points()];
    let minus = [g.minus.points()];
    let first = log_telescoped_minus_parts(m, &plus, &minus, eta_minus.points())?;
    let second = log_telescoped_plus_parts(m, &plus[..1], &minus, eta_plus.points())?;
    Ok(LogDensity::from_log(first + second))
}

/// `R(γ, η⁺, η⁻)` for `|η⁺| = |η⁻|` as the product of pair densities
/// `r(γ⁺ ∪ {x₁..x_{i−1}}, γ⁻ ∪ {y₁..y_{i−1}}, x_i, y_i)`.
pub fn telescoped_via_pairs(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    eta_plus: &Configuration,
    eta_minus: &Configuration,
) -> Result<LogDensity> {
    if eta_plus.len() != eta_minus.len() {
        return Err(Error::InvalidParameter(format!(
            "pair decomposition needs |η⁺| = |η⁻|, got {} and {}",
            eta_plus.len(),
            eta_minus.len()
        )));
    }
    let xs = eta_plus.points();
    let ys = eta_minus.points();
    let mut total = 0.0;
    for i in 0..xs.len() {
        let (x, y) = (&xs[i], &ys[i]);
        if x == y {
            return Err(Error::CoincidentPoint(x.coords().to_vec()));
        }
        let plus = [g.plus.points(), &xs[..i]];
        let minus = [g.minus.points(), &ys[..i], std::slice::from_ref(y)];
        total += log_relative_plus_parts(m, &plus, &minus, x)?;
        total += log_relative_minus_parts(m, &plus, &minus[..2], y)?;
    }
    Ok(LogDensity::from_log(total))
}

//! Reference answers for the finite-volume measure with empty boundary.
//!
//! Two independent routes:
//!
//! * rejection sampling from the product Poisson measure, accepting with
//!   probability `R(∅, η⁺, η⁻) ≤ 1` (non-negative potentials only);
//! * the Lebesgue–Poisson series
//!   `Z = e^{−2σ(Λ)} Σ_{n,m} 1/(n! m!) ∫ R(∅, ξ⁺, ξ⁻) dσⁿ(ξ⁺) dσᵐ(ξ⁻)`,
//!   truncated at `n, m ≤ n_max`, with Monte Carlo for each term.
//!
//! For non-negative potentials `R ≤ 1`, so the free-case Poisson tail bounds
//! the truncation error. Models with attractive terms are refused.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::{Configuration, Point, TwoComponentConfiguration, Window};
use crate::energy::{log_telescoped_parts, PotentialModel};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::stats::EstimateWithError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    /// Largest number of points per species kept in the series.
    pub n_max: usize,
    /// Monte Carlo draws for each `(n, m)` term.
    pub mc_points_per_term: usize,
}

impl SeriesTruncation {
    pub fn new(n_max: usize, mc_points_per_term: usize) -> Self {
        SeriesTruncation {
            n_max,
            mc_points_per_term,
        }
    }

    /// Upper bound on the dropped part of a two-species series whose
    /// integrand is at most 1: `1 − (e^{−σ} Σ_{n ≤ n_max} σⁿ/n!)²`.
    pub fn tail_bound(&self, mass: f64) -> f64 {
        let kept = poisson_cdf(self.n_max, mass);
        (1.0 - kept * kept).max(0.0)
    }
}

/// `P(Poisson(mean) ≤ n)`.
fn poisson_cdf(n: usize, mean: f64) -> f64 {
    let mut term = (-mean).exp();
    let mut sum = term;
    for k in 1..=n {
        term *= mean / k as f64;
        sum += term;
    }
    sum.min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub truncation_bound: f64,
    pub mc_std_err: f64,
}

impl OracleResult {
    /// Total error allowance: `k_sigma` standard errors plus the truncation bound.
    pub fn tolerance(&self, k_sigma: f64) -> f64 {
        k_sigma * self.mc_std_err + self.truncation_bound
    }
}

fn require_nonnegative(m: &PotentialModel) -> Result<()> {
    if m.is_nonnegative() {
        Ok(())
    } else {
        Err(Error::NotNonnegativeModel)
    }
}

/// One exact draw and the number of proposals it took.
pub fn rejection_sample(
    m: &PotentialModel,
    w: &Window,
    rng: &mut RngState,
) -> Result<(TwoComponentConfiguration, u64)> {
    require_nonnegative(m)?;
    let mut attempts = 0;
    loop {
        attempts += 1;
        let plus = m.intensity.sample_poisson(w, rng);
        let minus = m.intensity.sample_poisson(w, rng);
        let log_r = match log_telescoped_parts(m, &[], &[], plus.points(), minus.points()) {
            Ok(v) => v,
            // cross coincidence, probability zero
            Err(Error::CoincidentPoint(_)) => continue,
            Err(e) => return Err(e),
        };
        if log_r == f64::NEG_INFINITY {
            continue;
        }
        if log_r >= 0.0 || (1.0 - rng.uniform()).ln() < log_r {
            let pair = TwoComponentConfiguration { plus, minus };
            return Ok((pair, attempts));
        }
    }
}

/// Batch of iid rejection draws.
#[derive(Debug, Clone)]
pub struct RejectionBatch {
    pub samples: Vec<TwoComponentConfiguration>,
    pub attempts: u64,
}

impl RejectionBatch {
    /// Fraction of accepted proposals; estimates `E_{π×π}[R(∅, η⁺, η⁻)]`.
    pub fn acceptance_rate(&self) -> EstimateWithError {
        let p = self.samples.len() as f64 / self.attempts as f64;
        EstimateWithError {
            estimate: p,
            std_err: (p * (1.0 - p) / self.attempts as f64).sqrt(),
            n_samples: self.attempts as usize,
        }
    }
}

/// `n` draws; draw `i` uses child stream `i` of `rng`, so the batch does not
/// depend on thread scheduling.
pub fn rejection_samples(
    m: &PotentialModel,
    w: &Window,
    n: usize,
    rng: &RngState,
) -> Result<RejectionBatch> {
    require_nonnegative(m)?;
    let draws: Vec<(TwoComponentConfiguration, u64)> = (0..n)
        .into_par_iter()
        .map(|i| rejection_sample(m, w, &mut rng.fork(i as u64)))
        .collect::<Result<_>>()?;
    let attempts = draws.iter().map(|(_, a)| a).sum();
    Ok(RejectionBatch {
        samples: draws.into_iter().map(|(s, _)| s).collect(),
        attempts,
    })
}

/// `ln(n!)`.
fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// `−U(ξ⁺, ξ⁻)` for flat coordinate buffers of dimension `d`, which is
/// `log R(∅, ξ⁺, ξ⁻)`. `None` if two points coincide.
fn log_weight_from_empty(m: &PotentialModel, d: usize, plus: &[f64], minus: &[f64]) -> Option<f64> {
    let dist2 =
        |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum() };
    let mut energy = 0.0;
    let groups = [
        (plus, plus, &m.self_plus),
        (minus, minus, &m.self_minus),
        (plus, minus, &m.cross),
    ];
    for (gi, (a, b, pot)) in groups.into_iter().enumerate() {
        let same = gi < 2;
        for (i, x) in a.chunks_exact(d).enumerate() {
            let others = if same { &b[(i + 1) * d..] } else { b };
            for y in others.chunks_exact(d) {
                let d2 = dist2(x, y);
                if d2 == 0.0 {
                    return None;
                }
                energy += pot.at_dist2(d2);
            }
        }
    }
    Some(-energy)
}

/// Mean and standard error of `∫ R(∅, η ∪ ξ) dσⁿ(ξ⁺) dσᵏ(ξ⁻)` for one term.
fn term_integral(
    m: &PotentialModel,
    w: &Window,
    eta: (&[Point], &[Point]),
    n: usize,
    k: usize,
    draws: usize,
    rng: &mut RngState,
) -> Result<EstimateWithError> {
    let d = w.dim();
    let flat = |pts: &[Point], extra: usize| -> Vec<f64> {
        let mut v: Vec<f64> = pts
            .iter()
            .flat_map(|p| p.coords().iter().copied())
            .collect();
        v.resize(v.len() + extra * d, 0.0);
        v
    };
    let mut plus = flat(eta.0, n);
    let mut minus = flat(eta.1, k);
    let (skip_plus, skip_minus) = (eta.0.len() * d, eta.1.len() * d);
    let (lower, upper) = (w.lower(), w.upper());
    let volume = w.volume();
    let mut values = Vec::with_capacity(draws);
    while values.len() < draws {
        let mut weight = 1.0;
        for buf in [&mut plus[skip_plus..], &mut minus[skip_minus..]] {
            for x in buf.chunks_exact_mut(d) {
                for (i, c) in x.iter_mut().enumerate() {
                    *c = rng.uniform_range(lower[i], upper[i]);
                }
                weight *= volume * m.intensity.rate_at_coords(x);
            }
        }
        // an exact coincidence has probability zero: discard and redraw
        if let Some(log_r) = log_weight_from_empty(m, d, &plus, &minus) {
            values.push(weight * log_r.exp());
        }
    }
    EstimateWithError::from_values(&values)
}

/// Truncated series `e^{−2σ} Σ_{n,m ≤ n_max} 1/(n! m!) ∫ R(∅, η ∪ ξ)`.
fn series(
    m: &PotentialModel,
    w: &Window,
    eta: (&[Point], &[Point]),
    t: &SeriesTruncation,
    rng: &RngState,
) -> Result<OracleResult> {
    let mass = m.intensity.mass(w);
    let terms: Vec<(usize, usize)> = (0..=t.n_max)
        .flat_map(|n| (0..=t.n_max).map(move |k| (n, k)))
        .collect();
    let pieces: Vec<(f64, f64)> = terms
        .par_iter()
        .map(|&(n, k)| {
            let scale = (-2.0 * mass - ln_factorial(n) - ln_factorial(k)).exp();
            if n == 0 && k == 0 && eta.0.is_empty() && eta.1.is_empty() {
                return Ok((scale, 0.0));
            }
            // keyed by (n, k) so that a larger n_max only adds terms
            let mut child = rng.fork(((n as u64) << 32) | k as u64);
            let est = term_integral(m, w, eta, n, k, t.mc_points_per_term.max(2), &mut child)?;
            Ok((scale * est.estimate, scale * est.std_err))
        })
        .collect::<Result<_>>()?;
    // fixed summation order
    let value = pieces.iter().map(|p| p.0).sum();
    let var: f64 = pieces.iter().map(|p| p.1 * p.1).sum();
    Ok(OracleResult {
        value,
        truncation_bound: t.tail_bound(mass),
        mc_std_err: var.sqrt(),
    })
}

/// Partition function normalised by the product Poisson measure,
/// `Z = E_{π×π}[R(∅, η⁺, η⁻)]`.
pub fn partition_function(
    m: &PotentialModel,
    w: &Window,
    t: &SeriesTruncation,
    rng: &RngState,
) -> Result<OracleResult> {
    require_nonnegative(m)?;
    series(m, w, (&[], &[]), t, rng)
}

/// Correlation function `k(η⁺, η⁻)` as the ratio of the shifted series to
/// the partition function. `k(∅, ∅) = 1` is returned exactly.
pub fn exact_correlation(
    m: &PotentialModel,
    w: &Window,
    eta_plus: &Configuration,
    eta_minus: &Configuration,
    t: &SeriesTruncation,
    rng: &RngState,
) -> Result<OracleResult> {
    require_nonnegative(m)?;
    if let Some(p) = eta_plus
        .iter()
        .chain(eta_minus.iter())
        .find(|p| !w.contains(p))
    {
        return Err(Error::InvalidParameter(format!(
            "correlation point {:?} lies outside the window",
            p.coords()
        )));
    }
    // surfaces coincidences between the two species
    log_telescoped_parts(m, &[], &[], eta_plus.points(), eta_minus.points())?;
    if eta_plus.is_empty() && eta_minus.is_empty() {
        return Ok(OracleResult {
            value: 1.0,
            truncation_bound: 0.0,
            mc_std_err: 0.0,
        });
    }
    let numerator = series(
        m,
        w,
        (eta_plus.points(), eta_minus.points()),
        t,
        &rng.fork(0),
    )?;
    let z = series(m, w, (&[], &[]), t, &rng.fork(1))?;
    let k = numerator.value / z.value;
    let rel_z = z.mc_std_err / z.value;
    let mc_std_err = if numerator.value > 0.0 {
        k * ((numerator.mc_std_err / numerator.value).powi(2) + rel_z * rel_z).sqrt()
    } else {
        numerator.mc_std_err / z.value
    };
    // both series are under-estimates by at most the same tail T:
    // k ∈ [N / (Z + T), (N + T) / Z]
    let tail = z.truncation_bound;
    let truncation_bound =
        (numerator.value / z.value - numerator.value / (z.value + tail)).max(tail / z.value);
    Ok(OracleResult {
        value: k,
        truncation_bound,
        mc_std_err,
    })
}

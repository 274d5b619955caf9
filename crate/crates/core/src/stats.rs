//! Monte Carlo estimates with standard errors and a few goodness-of-fit tests.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub estimate: f64,
    pub std_err: f64,
    pub n_samples: usize,
}

impl EstimateWithError {
    /// Sample mean and `sd / √n`. With a single value the error is reported as 0.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_err = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        Ok(EstimateWithError {
            estimate: mean,
            std_err,
            n_samples: n,
        })
    }

    pub fn exact(value: f64, n_samples: usize) -> Self {
        EstimateWithError {
            estimate: value,
            std_err: 0.0,
            n_samples,
        }
    }

    /// Fewer than two samples: the error bar is meaningless.
    pub fn is_degenerate(&self) -> bool {
        self.n_samples < 2
    }
}

/// `(a − b) / se`; 0 when both agree with zero error, `±∞` when they differ.
pub fn z_score(a: f64, b: f64, se: f64) -> f64 {
    let diff = a - b;
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// z-score of two independent estimates.
pub fn independent_z(a: &EstimateWithError, b: &EstimateWithError) -> f64 {
    z_score(a.estimate, b.estimate, a.std_err.hypot(b.std_err))
}

/// Standard error of the mean of a correlated series from `batches`
/// contiguous batch means. Trailing values that do not fill a batch are
/// dropped.
pub fn batch_means_std_err(xs: &[f64], batches: usize) -> Result<f64> {
    let size = xs.len() / batches.max(1);
    if batches < 2 || size == 0 {
        return Err(Error::TooFewSamples {
            needed: 2 * batches.max(1),
            got: xs.len(),
        });
    }
    let means: Vec<f64> = xs.chunks_exact(size).take(batches).map(mean).collect();
    Ok((variance(&means) / batches as f64).sqrt())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Pearson correlation; 0 if either input is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Chi-square goodness of fit of integer counts against Poisson(`mean`).
///
/// Adjacent values are pooled left to right until every cell expects at
/// least 5 observations; the upper tail joins the last cell. Returns
/// `(statistic, p)` with `cells − 1` degrees of freedom.
pub fn poisson_chi_square(counts: &[u64], mean: f64) -> (f64, f64) {
    let n = counts.len() as f64;
    let k_max = (mean + 10.0 * mean.sqrt() + 10.0).ceil() as u64;
    // (upper value of cell, expected count)
    let mut cells: Vec<(u64, f64)> = Vec::new();
    let mut pmf = (-mean).exp();
    let mut acc = 0.0;
    let mut cdf = 0.0;
    for k in 0..=k_max {
        if k > 0 {
            pmf *= mean / k as f64;
        }
        acc += n * pmf;
        cdf += pmf;
        if acc >= 5.0 {
            cells.push((k, acc));
            acc = 0.0;
        }
    }
    let tail = acc + n * (1.0 - cdf).max(0.0);
    match cells.last_mut() {
        Some(last) => last.1 += tail,
        None => cells.push((k_max, tail)),
    }
    let mut observed = vec![0.0; cells.len()];
    for &c in counts {
        let idx = cells
            .iter()
            .position(|&(upper, _)| c <= upper)
            .unwrap_or(cells.len() - 1);
        observed[idx] += 1.0;
    }
    let stat: f64 = observed
        .iter()
        .zip(&cells)
        .map(|(o, (_, e))| (o - e).powi(2) / e)
        .sum();
    let df = (cells.len().max(2) - 1) as f64;
    (stat, gamma_ur(df / 2.0, stat / 2.0))
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    (d, kolmogorov_q(lambda))
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (−1)^{j−1} e^{−2 j² λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = sign * (-2.0 * (j as f64).powi(2) * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

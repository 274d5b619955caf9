//! Exact identities between relative energy densities, checked on random
//! configurations for a fixed model.

use serde::{Deserialize, Serialize};

use crate::configuration::{Configuration, Point, TwoComponentConfiguration, Window};
use crate::energy::{
    relative_minus, relative_plus, telescoped, telescoped_via_pairs, LogDensity, PotentialModel,
};
use crate::error::Result;
use crate::rng::RngState;

/// Relative tolerance on logs.
pub const ALGEBRAIC_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicReport {
    pub identity: String,
    pub instances: usize,
    pub failures: usize,
    /// Largest [`log_discrepancy`] seen.
    pub max_discrepancy: f64,
    pub pass: bool,
}

/// 0 if both are zero densities, `∞` if exactly one is, otherwise
/// `|a − b| / max(1, |a|, |b|)` on the logs.
pub fn log_discrepancy(a: LogDensity, b: LogDensity) -> f64 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => 0.0,
        (false, false) => {
            let scale = 1.0f64.max(a.log().abs()).max(b.log().abs());
            (a.log() - b.log()).abs() / scale
        }
        _ => f64::INFINITY,
    }
}

fn random_configuration(w: &Window, max_points: usize, rng: &mut RngState) -> Configuration {
    let n = rng.index(max_points + 1);
    let mut c = Configuration::empty();
    while c.len() < n {
        // exact duplicates have probability zero
        let _ = c.insert(w.sample_uniform(rng));
    }
    c
}

fn random_pair(w: &Window, max_points: usize, rng: &mut RngState) -> TwoComponentConfiguration {
    loop {
        let plus = random_configuration(w, max_points, rng);
        let minus = random_configuration(w, max_points, rng);
        if let Ok(g) = TwoComponentConfiguration::new(plus, minus) {
            return g;
        }
    }
}

fn fresh(w: &Window, g: &TwoComponentConfiguration, taken: &[&Point], rng: &mut RngState) -> Point {
    loop {
        let x = w.sample_uniform(rng);
        if !g.contains(&x) && taken.iter().all(|t| *t != &x) {
            return x;
        }
    }
}

fn with_plus(g: &TwoComponentConfiguration, x: &Point) -> Result<TwoComponentConfiguration> {
    Ok(TwoComponentConfiguration {
        plus: g.plus.union_disjoint(x)?,
        minus: g.minus.clone(),
    })
}

fn with_minus(g: &TwoComponentConfiguration, y: &Point) -> Result<TwoComponentConfiguration> {
    Ok(TwoComponentConfiguration {
        plus: g.plus.clone(),
        minus: g.minus.union_disjoint(y)?,
    })
}

struct Tally {
    identity: &'static str,
    instances: usize,
    failures: usize,
    max: f64,
}

impl Tally {
    fn new(identity: &'static str) -> Self {
        Tally {
            identity,
            instances: 0,
            failures: 0,
            max: 0.0,
        }
    }

    fn record(&mut self, a: LogDensity, b: LogDensity) {
        let d = log_discrepancy(a, b);
        self.instances += 1;
        if !(d <= ALGEBRAIC_TOL) {
            self.failures += 1;
        }
        if d > self.max || d.is_nan() {
            self.max = d;
        }
    }

    fn finish(self) -> AlgebraicReport {
        AlgebraicReport {
            identity: self.identity.to_string(),
            instances: self.instances,
            failures: self.failures,
            max_discrepancy: self.max,
            pass: self.failures == 0,
        }
    }
}

/// Insertion-order consistency of single-species densities:
/// `r±(γ ∪ x₁, x₂) r±(γ, x₁) = r±(γ ∪ x₂, x₁) r±(γ, x₂)`, both species.
pub fn check_cocycle(
    m: &PotentialModel,
    w: &Window,
    instances: usize,
    max_points: usize,
    rng: &mut RngState,
) -> Result<AlgebraicReport> {
    let mut tally = Tally::new("cocycle");
    for _ in 0..instances {
        let g = random_pair(w, max_points, rng);
        let x1 = fresh(w, &g, &[], rng);
        let x2 = fresh(w, &g, &[&x1], rng);
        let lhs = relative_plus(m, &with_plus(&g, &x1)?, &x2)? * relative_plus(m, &g, &x1)?;
        let rhs = relative_plus(m, &with_plus(&g, &x2)?, &x1)? * relative_plus(m, &g, &x2)?;
        tally.record(lhs, rhs);
        let lhs = relative_minus(m, &with_minus(&g, &x1)?, &x2)? * relative_minus(m, &g, &x1)?;
        let rhs = relative_minus(m, &with_minus(&g, &x2)?, &x1)? * relative_minus(m, &g, &x2)?;
        tally.record(lhs, rhs);
    }
    Ok(tally.finish())
}

/// Compatibility of the two species:
/// `r⁺(γ⁺, γ⁻ ∪ y, x) r⁻(γ, y) = r⁻(γ⁺ ∪ x, γ⁻, y) r⁺(γ, x)`.
pub fn check_balance(
    m: &PotentialModel,
    w: &Window,
    instances: usize,
    max_points: usize,
    rng: &mut RngState,
) -> Result<AlgebraicReport> {
    let mut tally = Tally::new("balance");
    for _ in 0..instances {
        let g = random_pair(w, max_points, rng);
        let x = fresh(w, &g, &[], rng);
        let y = fresh(w, &g, &[&x], rng);
        let lhs = relative_plus(m, &with_minus(&g, &y)?, &x)? * relative_minus(m, &g, &y)?;
        let rhs = relative_minus(m, &with_plus(&g, &x)?, &y)? * relative_plus(m, &g, &x)?;
        tally.record(lhs, rhs);
    }
    Ok(tally.finish())
}

/// `R(γ, η⁺, η⁻)` against the product of pair densities for
/// `|η⁺| = |η⁻| ≤ max_eta`.
pub fn check_pair_product(
    m: &PotentialModel,
    w: &Window,
    instances: usize,
    max_points: usize,
    max_eta: usize,
    rng: &mut RngState,
) -> Result<AlgebraicReport> {
    let mut tally = Tally::new("r-product");
    for _ in 0..instances {
        let g = random_pair(w, max_points, rng);
        let n = rng.index(max_eta + 1);
        let mut taken: Vec<Point> = Vec::with_capacity(2 * n);
        while taken.len() < 2 * n {
            let refs: Vec<&Point> = taken.iter().collect();
            let p = fresh(w, &g, &refs, rng);
            taken.push(p);
        }
        let minus_pts = taken.split_off(n);
        let eta_plus = Configuration::from_points(taken)?;
        let eta_minus = Configuration::from_points(minus_pts)?;
        let lhs = telescoped(m, &g, &eta_plus, &eta_minus)?;
        let rhs = telescoped_via_pairs(m, &g, &eta_plus, &eta_minus)?;
        tally.record(lhs, rhs);
    }
    Ok(tally.finish())
}

//! Helpers shared by the integration tests: an independent total-energy
//! oracle and random model/configuration generators.

#![allow(dead_code)]

pub mod identities;

use bigibbs::{
    Configuration, IntensityMeasure, PairPotential, Point, PotentialModel, RngState,
    TwoComponentConfiguration, Window,
};

/// Pair energy written from scratch; `+∞` inside a hard core.
pub fn pair_energy(p: &PairPotential, x: &Point, y: &Point) -> f64 {
    let r = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    match *p {
        PairPotential::None => 0.0,
        PairPotential::Step { amplitude, range } => {
            if r <= range {
                amplitude
            } else {
                0.0
            }
        }
        PairPotential::HardCore { range } => {
            if r <= range {
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
            if r <= range {
                amplitude * (range / r).powf(exponent)
            } else {
                0.0
            }
        }
    }
}

/// Total energy `U(γ⁺, γ⁻)` summed over unordered pairs.
pub fn total_energy(m: &PotentialModel, plus: &[Point], minus: &[Point]) -> f64 {
    let mut u = 0.0;
    for (i, a) in plus.iter().enumerate() {
        for b in &plus[i + 1..] {
            u += pair_energy(&m.self_plus, a, b);
        }
        for b in minus {
            u += pair_energy(&m.cross, a, b);
        }
    }
    for (i, a) in minus.iter().enumerate() {
        for b in &minus[i + 1..] {
            u += pair_energy(&m.self_minus, a, b);
        }
    }
    u
}

/// `log R(γ, η⁺, η⁻) = −(U(γ ∪ η) − U(γ))` for feasible `γ`.
pub fn brute_log_r(
    m: &PotentialModel,
    g: &TwoComponentConfiguration,
    eta_plus: &[Point],
    eta_minus: &[Point],
) -> f64 {
    let base = total_energy(m, g.plus.points(), g.minus.points());
    assert!(base.is_finite(), "reference configuration must be feasible");
    let mut plus = g.plus.points().to_vec();
    plus.extend_from_slice(eta_plus);
    let mut minus = g.minus.points().to_vec();
    minus.extend_from_slice(eta_minus);
    let full = total_energy(m, &plus, &minus);
    if full.is_infinite() {
        f64::NEG_INFINITY
    } else {
        -(full - base)
    }
}

pub fn random_potential(rng: &mut RngState) -> PairPotential {
    let range = 0.05 + 0.3 * rng.uniform();
    match rng.index(4) {
        0 => PairPotential::None,
        1 => PairPotential::step(4.0 * rng.uniform() - 1.0, range).unwrap(),
        2 => PairPotential::hard_core(0.3 * range).unwrap(),
        _ => {
            PairPotential::soft_core(2.0 * rng.uniform(), range, 1.0 + 5.0 * rng.uniform()).unwrap()
        }
    }
}

pub fn random_model(rng: &mut RngState) -> PotentialModel {
    PotentialModel::new(
        random_potential(rng),
        random_potential(rng),
        random_potential(rng),
        IntensityMeasure::homogeneous(0.5 + rng.uniform()).unwrap(),
    )
}

pub fn random_points(w: &Window, n: usize, rng: &mut RngState) -> Vec<Point> {
    (0..n).map(|_| w.sample_uniform(rng)).collect()
}

/// Random feasible `γ` with up to `max` points per species.
pub fn random_feasible(
    m: &PotentialModel,
    w: &Window,
    max: usize,
    rng: &mut RngState,
) -> TwoComponentConfiguration {
    loop {
        let np = rng.index(max + 1);
        let nm = rng.index(max + 1);
        let plus = random_points(w, np, rng);
        let minus = random_points(w, nm, rng);
        if total_energy(m, &plus, &minus).is_finite() {
            return TwoComponentConfiguration::new(
                Configuration::from_points(plus).unwrap(),
                Configuration::from_points(minus).unwrap(),
            )
            .unwrap();
        }
    }
}

pub fn conf(points: &[[f64; 2]]) -> Configuration {
    Configuration::from_points(points.iter().map(|&p| Point::from_array(p)).collect()).unwrap()
}

pub fn homogeneous(z: f64) -> IntensityMeasure {
    IntensityMeasure::homogeneous(z).unwrap()
}

/// Cross step `a = 1`, range 0.3.
pub fn cross_step(z: f64) -> PotentialModel {
    PotentialModel::new(
        PairPotential::step(1.0, 0.3).unwrap(),
        PairPotential::None,
        PairPotential::None,
        homogeneous(z),
    )
}

/// Cross hard core of the given range.
pub fn cross_hard_core(z: f64, range: f64) -> PotentialModel {
    PotentialModel::new(
        PairPotential::hard_core(range).unwrap(),
        PairPotential::None,
        PairPotential::None,
        homogeneous(z),
    )
}

/// Repulsive model with all three potentials active.
pub fn mixed_repulsive(z: f64) -> PotentialModel {
    PotentialModel::new(
        PairPotential::soft_core(0.5, 0.25, 3.0).unwrap(),
        PairPotential::step(0.7, 0.2).unwrap(),
        PairPotential::hard_core(0.08).unwrap(),
        homogeneous(z),
    )
}

/// Hard-core violations and cross coincidences in `g` under `m`.
pub fn support_violations(m: &PotentialModel, g: &TwoComponentConfiguration) -> usize {
    let disjoint = usize::from(!g.is_disjoint());
    let feasible = usize::from(total_energy(m, g.plus.points(), g.minus.points()).is_infinite());
    disjoint + feasible
}

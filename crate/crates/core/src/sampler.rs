//! Birth–death Metropolis–Hastings for the finite-volume two-species Gibbs
//! measure.
//!
//! The target on `Γ_Λ × Γ_Λ` has density `R(b, η⁺, η⁻)` with respect to the
//! product Poisson measure, where `b` is a frozen boundary configuration
//! outside the window (empty by default). Each step picks a species and a
//! birth or a death with probability ½ each. A birth proposes `x` uniform
//! in `Λ` and is accepted with probability
//!
//! ```text
//! min(1, z·|Λ|·ρ(x) / (n + 1) · r±(γ ∪ b, x))
//! ```
//!
//! and a death removes a uniformly chosen point with the reciprocal ratio.
//! The chain is reversible with respect to the target.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::{Point, TwoComponentConfiguration, Window};
use crate::energy::{
    log_relative_minus_parts, log_relative_plus_parts, log_telescoped_parts, PotentialModel,
};
use crate::error::{Error, Result};
use crate::rng::RngState;

/// Species label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub model: PotentialModel,
    pub window: Window,
    /// Frozen configuration outside the window.
    pub boundary: TwoComponentConfiguration,
    pub steps: u64,
    pub burnin: u64,
    pub thin: u64,
    pub seed: u64,
}

impl ChainSpec {
    /// Spec with empty boundary and the heuristic burn-in and thinning of
    /// [`default_burnin`] and [`DEFAULT_THIN`].
    pub fn new(model: PotentialModel, window: Window, steps: u64, seed: u64) -> Result<Self> {
        let burnin = default_burnin(model.intensity.mass(&window)).min(steps.saturating_sub(1));
        let spec = ChainSpec {
            model,
            window,
            boundary: TwoComponentConfiguration::empty(),
            steps,
            burnin,
            thin: DEFAULT_THIN,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_burnin(mut self, burnin: u64) -> Self {
        self.burnin = burnin;
        self
    }

    pub fn with_thin(mut self, thin: u64) -> Self {
        self.thin = thin;
        self
    }

    pub fn with_boundary(mut self, boundary: TwoComponentConfiguration) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps <= self.burnin {
            return Err(Error::InvalidParameter(format!(
                "steps ({}) must exceed burnin ({})",
                self.steps, self.burnin
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidParameter("thin must be at least 1".into()));
        }
        if self.model.intensity.density().max_on(&self.window) <= 0.0 {
            return Err(Error::InvalidParameter(
                "intensity vanishes on the window".into(),
            ));
        }
        Ok(())
    }

    /// Number of samples [`run`] returns.
    pub fn n_samples(&self) -> u64 {
        (self.steps - self.burnin) / self.thin
    }
}

pub const DEFAULT_THIN: u64 = 50;

/// `1000 · max(1, σ(Λ))` steps: ten times the expected point count, times 100.
pub fn default_burnin(mass: f64) -> u64 {
    (1000.0 * mass.max(1.0)).ceil() as u64
}

/// Proposed / accepted counts for one move type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveCounter {
    pub proposed: u64,
    pub accepted: u64,
}

impl MoveCounter {
    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += accepted as u64;
    }

    fn merge(&mut self, other: &MoveCounter) {
        self.proposed += other.proposed;
        self.accepted += other.accepted;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceStats {
    pub birth_plus: MoveCounter,
    pub death_plus: MoveCounter,
    pub birth_minus: MoveCounter,
    pub death_minus: MoveCounter,
}

impl AcceptanceStats {
    pub fn merge(&mut self, other: &AcceptanceStats) {
        self.birth_plus.merge(&other.birth_plus);
        self.death_plus.merge(&other.death_plus);
        self.birth_minus.merge(&other.birth_minus);
        self.death_minus.merge(&other.death_minus);
    }

    pub fn overall_rate(&self) -> f64 {
        let all = [
            self.birth_plus,
            self.death_plus,
            self.birth_minus,
            self.death_minus,
        ];
        let proposed: u64 = all.iter().map(|c| c.proposed).sum();
        let accepted: u64 = all.iter().map(|c| c.accepted).sum();
        if proposed == 0 {
            0.0
        } else {
            accepted as f64 / proposed as f64
        }
    }

    fn counter(&mut self, species: Species, birth: bool) -> &mut MoveCounter {
        match (species, birth) {
            (Species::Plus, true) => &mut self.birth_plus,
            (Species::Plus, false) => &mut self.death_plus,
            (Species::Minus, true) => &mut self.birth_minus,
            (Species::Minus, false) => &mut self.death_minus,
        }
    }
}

/// What a single step did.
#[derive(Debug, Clone, PartialEq)]
pub enum Move {
    Birth(Species, Point),
    Death(Species, Point),
    Rejected,
}

#[derive(Debug, Clone)]
pub struct ChainState {
    pub current: TwoComponentConfiguration,
    pub step: u64,
    pub rng: RngState,
    pub stats: AcceptanceStats,
}

impl ChainState {
    /// `log R(b, γ⁺, γ⁻)` of the current configuration given the boundary.
    pub fn log_density(&self, spec: &ChainSpec) -> Result<f64> {
        log_telescoped_parts(
            &spec.model,
            &[spec.boundary.plus.points()],
            &[spec.boundary.minus.points()],
            self.current.plus.points(),
            self.current.minus.points(),
        )
    }
}

/// Empty initial state on stream `stream` of `spec.seed`.
pub fn init(spec: &ChainSpec, stream: u64) -> Result<ChainState> {
    let b = &spec.boundary;
    if b.plus
        .iter()
        .chain(b.minus.iter())
        .any(|p| spec.window.contains(p))
    {
        return Err(Error::InfeasibleBoundary);
    }
    let feasible = log_telescoped_parts(&spec.model, &[], &[], b.plus.points(), b.minus.points())
        .map_err(|_| Error::InfeasibleBoundary)?;
    if feasible == f64::NEG_INFINITY {
        return Err(Error::InfeasibleBoundary);
    }
    Ok(ChainState {
        current: TwoComponentConfiguration::empty(),
        step: 0,
        rng: RngState::new(spec.seed, stream),
        stats: AcceptanceStats::default(),
    })
}

/// Advances the chain by one proposal.
pub fn step(state: &mut ChainState, spec: &ChainSpec) -> Move {
    state.step += 1;
    let species = if state.rng.coin() {
        Species::Plus
    } else {
        Species::Minus
    };
    let birth = state.rng.coin();
    let outcome = if birth {
        propose_birth(state, spec, species)
    } else {
        propose_death(state, spec, species)
    };
    state
        .stats
        .counter(species, birth)
        .record(!matches!(outcome, Move::Rejected));
    outcome
}

fn log_relative(
    m: &PotentialModel,
    species: Species,
    plus: &[&[Point]],
    minus: &[&[Point]],
    x: &Point,
) -> Result<f64> {
    match species {
        Species::Plus => log_relative_plus_parts(m, plus, minus, x),
        Species::Minus => log_relative_minus_parts(m, plus, minus, x),
    }
}

fn accept(rng: &mut RngState, log_ratio: f64) -> bool {
    if log_ratio >= 0.0 {
        return true;
    }
    // 1 − U lies in (0, 1]
    (1.0 - rng.uniform()).ln() < log_ratio
}

fn propose_birth(state: &mut ChainState, spec: &ChainSpec, species: Species) -> Move {
    let x = spec.window.sample_uniform(&mut state.rng);
    let rate = spec.model.intensity.rate_at(&x) * spec.window.volume();
    if rate <= 0.0 {
        return Move::Rejected;
    }
    let cur = &state.current;
    let n = match species {
        Species::Plus => cur.plus.len(),
        Species::Minus => cur.minus.len(),
    };
    let plus = [cur.plus.points(), spec.boundary.plus.points()];
    let minus = [cur.minus.points(), spec.boundary.minus.points()];
    let log_r = match log_relative(&spec.model, species, &plus, &minus, &x) {
        Ok(v) => v,
        // exact collision with an existing point
        Err(_) => return Move::Rejected,
    };
    let log_ratio = rate.ln() - ((n + 1) as f64).ln() + log_r;
    if log_r == f64::NEG_INFINITY || !accept(&mut state.rng, log_ratio) {
        return Move::Rejected;
    }
    match species {
        Species::Plus => state.current.plus.push_unchecked(x.clone()),
        Species::Minus => state.current.minus.push_unchecked(x.clone()),
    }
    Move::Birth(species, x)
}

fn propose_death(state: &mut ChainState, spec: &ChainSpec, species: Species) -> Move {
    let cur = &state.current;
    let pts = match species {
        Species::Plus => cur.plus.points(),
        Species::Minus => cur.minus.points(),
    };
    let n = pts.len();
    if n == 0 {
        return Move::Rejected;
    }
    let i = state.rng.index(n);
    let x = &pts[i];
    let rate = spec.model.intensity.rate_at(x) * spec.window.volume();
    let (before, after) = (&pts[..i], &pts[i + 1..]);
    let log_r = match species {
        Species::Plus => log_relative_plus_parts(
            &spec.model,
            &[before, after, spec.boundary.plus.points()],
            &[cur.minus.points(), spec.boundary.minus.points()],
            x,
        ),
        Species::Minus => log_relative_minus_parts(
            &spec.model,
            &[cur.plus.points(), spec.boundary.plus.points()],
            &[before, after, spec.boundary.minus.points()],
            x,
        ),
    }
    .expect("points of a valid state are distinct");
    let log_ratio = (n as f64).ln() - rate.ln() - log_r;
    if !accept(&mut state.rng, log_ratio) {
        return Move::Rejected;
    }
    let removed = match species {
        Species::Plus => state.current.plus.remove(i),
        Species::Minus => state.current.minus.remove(i),
    };
    Move::Death(species, removed)
}

/// Output of one or more chains.
#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub samples: Vec<TwoComponentConfiguration>,
    pub stats: AcceptanceStats,
}

/// Runs one chain on stream `stream`, keeping every `thin`-th state after
/// burn-in.
pub fn run_stream(spec: &ChainSpec, stream: u64) -> Result<ChainOutput> {
    spec.validate()?;
    let mut state = init(spec, stream)?;
    let mut samples = Vec::with_capacity(spec.n_samples() as usize);
    while state.step < spec.steps {
        step(&mut state, spec);
        if state.step > spec.burnin && (state.step - spec.burnin).is_multiple_of(spec.thin) {
            samples.push(state.current.clone());
        }
    }
    Ok(ChainOutput {
        samples,
        stats: state.stats,
    })
}

/// Thinned samples of a single chain on stream 0.
pub fn run(spec: &ChainSpec) -> Result<Vec<TwoComponentConfiguration>> {
    run_stream(spec, 0).map(|out| out.samples)
}

/// `chains` independent chains on streams `0..chains`, run in parallel and
/// concatenated in stream order.
pub fn run_chains(spec: &ChainSpec, chains: u64) -> Result<ChainOutput> {
    let outputs: Vec<ChainOutput> = (0..chains)
        .into_par_iter()
        .map(|c| run_stream(spec, c))
        .collect::<Result<_>>()?;
    let mut merged = ChainOutput {
        samples: Vec::new(),
        stats: AcceptanceStats::default(),
    };
    for out in outputs {
        merged.samples.extend(out.samples);
        merged.stats.merge(&out.stats);
    }
    Ok(merged)
}

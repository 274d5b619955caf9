//! Two-species Gibbs point processes in bounded windows.
//!
//! The crate evaluates the partial relative energy densities (Papangelou
//! intensities) of a two-component pair-potential model, simulates the
//! finite-volume Gibbs measure by birth–death Metropolis–Hastings, provides
//! exact reference answers (rejection sampling and a truncated
//! Lebesgue–Poisson series), and checks the Campbell–Mecke, Ruelle-type and
//! correlation-function identities by Monte Carlo.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod configuration;
pub mod energy;
pub mod error;
pub mod intensity;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use configuration::{Configuration, Point, TwoComponentConfiguration, Window};
pub use energy::{LogDensity, PairPotential, PotentialModel};
pub use error::{Error, Result};
pub use intensity::{Density, IntensityMeasure};
pub use rng::RngState;
pub use stats::EstimateWithError;

//! The reference intensity measure `σ = z · ρ(x) dx` and Poisson sampling.

use std::fmt;
use std::sync::Arc;

use crate::configuration::{Configuration, Point, Window};
use crate::error::{Error, Result};
use crate::rng::RngState;

/// Default number of midpoint cells per axis for [`IntensityMeasure::mass`].
pub const DEFAULT_QUADRATURE_RESOLUTION: usize = 256;

type DensityFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Spatial modulation `ρ` of the intensity.
#[derive(Clone)]
pub enum Density {
    /// `ρ ≡ 1`.
    Constant,
    /// `ρ(x) = max(x₁, 0)`.
    LinearX1,
    /// User density with a declared upper bound, used for thinning.
    Custom { f: DensityFn, max: f64 },
}

impl Density {
    pub fn custom(f: impl Fn(&Point) -> f64 + Send + Sync + 'static, max: f64) -> Self {
        Density::Custom {
            f: Arc::new(f),
            max,
        }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            Density::Constant => 1.0,
            Density::LinearX1 => x.coords()[0].max(0.0),
            Density::Custom { f, .. } => f(x),
        }
    }

    /// Upper bound of `ρ` over `w`.
    pub fn max_on(&self, w: &Window) -> f64 {
        match self {
            Density::Constant => 1.0,
            Density::LinearX1 => w.upper()[0].max(0.0),
            Density::Custom { max, .. } => *max,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Density::Constant => "constant",
            Density::LinearX1 => "linear-x1",
            Density::Custom { .. } => "custom",
        }
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Custom { max, .. } => write!(f, "Custom {{ max: {max} }}"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IntensityMeasure {
    z: f64,
    density: Density,
    quadrature_resolution: usize,
}

impl IntensityMeasure {
    /// Homogeneous measure `z · Lebesgue`.
    pub fn homogeneous(z: f64) -> Result<Self> {
        Self::with_density(z, Density::Constant)
    }

    pub fn with_density(z: f64, density: Density) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "intensity z must be positive and finite, got {z}"
            )));
        }
        if let Density::Custom { max, .. } = &density {
            if !(*max >= 0.0) || !max.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "density bound must be finite and non-negative, got {max}"
                )));
            }
        }
        Ok(IntensityMeasure {
            z,
            density,
            quadrature_resolution: DEFAULT_QUADRATURE_RESOLUTION,
        })
    }

    pub fn with_quadrature_resolution(mut self, cells_per_axis: usize) -> Self {
        self.quadrature_resolution = cells_per_axis.max(1);
        self
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.density, Density::Constant)
    }

    /// `z · ρ(x)`, the Lebesgue density of σ at `x`.
    pub fn rate_at(&self, x: &Point) -> f64 {
        self.z * self.density.eval(x)
    }

    /// `z · ρ` at raw coordinates.
    pub(crate) fn rate_at_coords(&self, c: &[f64]) -> f64 {
        match &self.density {
            Density::Constant => self.z,
            Density::LinearX1 => self.z * c[0].max(0.0),
            custom => self.z * custom.eval(&Point::new(c.to_vec()).expect("finite draw")),
        }
    }

    /// `σ(w)`. Exact for constant density, midpoint quadrature otherwise.
    pub fn mass(&self, w: &Window) -> f64 {
        if self.is_homogeneous() {
            return self.z * w.volume();
        }
        let n = self.quadrature_resolution;
        let d = w.dim();
        let cell_volume: f64 = (0..d).map(|i| w.side(i) / n as f64).product();
        let total_cells = n.pow(d as u32);
        let mut coords = vec![0.0; d];
        let mut sum = 0.0;
        for cell in 0..total_cells {
            let mut rest = cell;
            for (i, c) in coords.iter_mut().enumerate() {
                let k = rest % n;
                rest /= n;
                *c = w.lower()[i] + (k as f64 + 0.5) * w.side(i) / n as f64;
            }
            sum += self
                .density
                .eval(&Point::new(coords.clone()).expect("finite midpoint"));
        }
        self.z * sum * cell_volume
    }

    /// One draw of the Poisson process with intensity σ restricted to `w`:
    /// a homogeneous process at the envelope rate, thinned by `ρ / ρ_max`.
    pub fn sample_poisson(&self, w: &Window, rng: &mut RngState) -> Configuration {
        let rho_max = self.density.max_on(w);
        let envelope = self.z * w.volume() * rho_max;
        let n = rng.poisson(envelope);
        let mut out = Configuration::empty();
        for _ in 0..n {
            let x = w.sample_uniform(rng);
            if !self.is_homogeneous() && rng.uniform() * rho_max >= self.density.eval(&x) {
                continue;
            }
            // exact collisions have probability zero; drop them if they occur
            let _ = out.insert(x);
        }
        out
    }

    /// Importance draw for `∫_w f dσ`: `x` uniform on `w` with weight
    /// `z · |w| · ρ(x)`, so `mean(f(x) · weight)` is unbiased.
    pub fn draw_sigma_point(&self, w: &Window, rng: &mut RngState) -> (Point, f64) {
        let x = w.sample_uniform(rng);
        let weight = self.z * w.volume() * self.density.eval(&x);
        (x, weight)
    }
}

//! Points, windows and finite (two-component) configurations.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngState;

/// A point of `R^d` with finite coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinitePoint(coords));
        }
        Ok(Point(coords))
    }

    /// Panics on non-finite or empty input; meant for literals.
    pub fn from_array<const N: usize>(coords: [f64; N]) -> Self {
        Point::new(coords.to_vec()).expect("point literal must be finite and non-empty")
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    /// Exact coordinate key; `-0.0` and `0.0` map to the same key.
    fn key(&self) -> Vec<u64> {
        self.0.iter().map(|c| (c + 0.0).to_bits()).collect()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// Axis-aligned closed box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Window {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidWindow(format!(
                "lower has {} coordinates, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() || !(l < u) {
                return Err(Error::InvalidWindow(format!(
                    "need lower[{i}] < upper[{i}], got {l} and {u}"
                )));
            }
        }
        Ok(Window { lower, upper })
    }

    /// `[0, 1]^d`.
    pub fn unit(dim: usize) -> Self {
        Window::new(vec![0.0; dim], vec![1.0; dim]).expect("dimension must be positive")
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn side(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).product()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.side(i).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Closed-box membership.
    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(c, (l, u))| l <= c && c <= u)
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.dim() == self.dim()
            && (0..self.dim())
                .all(|i| self.lower[i] <= other.lower[i] && other.upper[i] <= self.upper[i])
    }

    pub fn sample_uniform(&self, rng: &mut RngState) -> Point {
        let coords = (0..self.dim())
            .map(|i| rng.uniform_range(self.lower[i], self.upper[i]))
            .collect();
        Point(coords)
    }
}

/// A finite set of distinct points.
///
/// Insertion order is kept (it fixes the order in which telescoped densities
/// are evaluated) but equality is set equality.
#[derive(Clone, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Configuration {
    points: Vec<Point>,
}

impl Configuration {
    pub fn empty() -> Self {
        Configuration { points: Vec::new() }
    }

    /// Builds a configuration; fails on repeated points or mixed dimensions.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        if let Some(first) = points.first() {
            let d = first.dim();
            if let Some(bad) = points.iter().find(|p| p.dim() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: bad.dim(),
                });
            }
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !seen.insert(p.key()) {
                return Err(Error::DuplicatePoint(p.coords().to_vec()));
            }
        }
        Ok(Configuration { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.iter().any(|q| q == p)
    }

    /// Points of `self` inside `w` (closed box), in insertion order.
    pub fn project(&self, w: &Window) -> Configuration {
        Configuration {
            points: self
                .points
                .iter()
                .filter(|p| w.contains(p))
                .cloned()
                .collect(),
        }
    }

    /// Points of `self` outside `w`.
    pub fn outside(&self, w: &Window) -> Configuration {
        Configuration {
            points: self
                .points
                .iter()
                .filter(|p| !w.contains(p))
                .cloned()
                .collect(),
        }
    }

    /// `self ∪ {p}` for `p ∉ self`.
    pub fn union_disjoint(&self, p: &Point) -> Result<Configuration> {
        let mut out = self.clone();
        out.insert(p.clone())?;
        Ok(out)
    }

    /// `self ∪ other` for disjoint sets; `other`'s points go last, in order.
    pub fn union(&self, other: &Configuration) -> Result<Configuration> {
        let mut out = self.clone();
        for p in other.iter() {
            out.insert(p.clone())?;
        }
        Ok(out)
    }

    /// Appends `p`, rejecting duplicates.
    pub fn insert(&mut self, p: Point) -> Result<()> {
        if let Some(q) = self.points.first() {
            if q.dim() != p.dim() {
                return Err(Error::DimensionMismatch {
                    expected: q.dim(),
                    got: p.dim(),
                });
            }
        }
        if self.contains(&p) {
            return Err(Error::DuplicatePoint(p.0));
        }
        self.points.push(p);
        Ok(())
    }

    /// Removes and returns the point at `index`, keeping the order of the rest.
    pub fn remove(&mut self, index: usize) -> Point {
        self.points.remove(index)
    }

    /// Same points, reordered by `perm` (a permutation of `0..len`).
    pub fn permuted(&self, perm: &[usize]) -> Configuration {
        Configuration {
            points: perm.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }

    pub(crate) fn push_unchecked(&mut self, p: Point) {
        self.points.push(p);
    }

    fn sorted_keys(&self) -> Vec<Vec<u64>> {
        let mut keys: Vec<_> = self.points.iter().map(Point::key).collect();
        keys.sort();
        keys
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.sorted_keys() == other.sorted_keys()
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.points.iter()).finish()
    }
}

impl TryFrom<Vec<Point>> for Configuration {
    type Error = Error;
    fn try_from(points: Vec<Point>) -> Result<Self> {
        Configuration::from_points(points)
    }
}

impl From<Configuration> for Vec<Point> {
    fn from(c: Configuration) -> Self {
        c.points
    }
}

impl<'a> IntoIterator for &'a Configuration {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// A pair `(γ⁺, γ⁻)` of configurations, one per species.
///
/// Fields are public so degenerate (overlapping) pairs can be represented
/// and detected with [`is_disjoint`](Self::is_disjoint); [`new`](Self::new)
/// and deserialization reject them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct TwoComponentConfiguration {
    pub plus: Configuration,
    pub minus: Configuration,
}

#[derive(Deserialize)]
struct RawPair {
    plus: Configuration,
    minus: Configuration,
}

impl TryFrom<RawPair> for TwoComponentConfiguration {
    type Error = Error;
    fn try_from(raw: RawPair) -> Result<Self> {
        TwoComponentConfiguration::new(raw.plus, raw.minus)
    }
}

impl TwoComponentConfiguration {
    pub fn new(plus: Configuration, minus: Configuration) -> Result<Self> {
        let pair = TwoComponentConfiguration { plus, minus };
        if let Some(p) = pair.first_shared_point() {
            return Err(Error::NotDisjoint(p.coords().to_vec()));
        }
        Ok(pair)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// No exact coordinate coincidence between the two species.
    pub fn is_disjoint(&self) -> bool {
        self.first_shared_point().is_none()
    }

    fn first_shared_point(&self) -> Option<&Point> {
        if self.plus.is_empty() || self.minus.is_empty() {
            return None;
        }
        let keys: HashSet<Vec<u64>> = self.plus.iter().map(Point::key).collect();
        self.minus.iter().find(|p| keys.contains(&p.key()))
    }

    pub fn project(&self, w: &Window) -> Self {
        TwoComponentConfiguration {
            plus: self.plus.project(w),
            minus: self.minus.project(w),
        }
    }

    pub fn total_len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    /// True if `p` is a point of either species.
    pub fn contains(&self, p: &Point) -> bool {
        self.plus.contains(p) || self.minus.contains(p)
    }
}

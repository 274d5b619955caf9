use std::collections::HashMap;

use super::PairPotential;
use crate::configuration::Point;
use crate::error::{Error, Result};

/// Uniform grid over a point set for finite-range pair sums.
///
/// With cell side at least the interaction range only the `3^d` cells
/// around a query can hold interacting points.
#[derive(Debug, Clone)]
pub struct CellList<'a> {
    points: &'a [Point],
    side: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> CellList<'a> {
    pub fn new(points: &'a [Point], side: f64) -> Result<Self> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cell side must be positive and finite, got {side}"
            )));
        }
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(cell_of(p, side)).or_default().push(i);
        }
        Ok(CellList {
            points,
            side,
            cells,
        })
    }

    /// `Σ_y φ(x, y)` over the stored points. The potential's range must not
    /// exceed the cell side.
    pub fn phi_sum(&self, p: &PairPotential, x: &Point) -> Result<f64> {
        if let Some(range) = p.range() {
            if range > self.side {
                return Err(Error::InvalidParameter(format!(
                    "potential range {range} exceeds cell side {}",
                    self.side
                )));
            }
        }
        let centre = cell_of(x, self.side);
        let d = centre.len();
        let mut offset = vec![-1i64; d];
        let mut key = vec![0i64; d];
        let mut sum = 0.0;
        loop {
            for k in 0..d {
                key[k] = centre[k] + offset[k];
            }
            if let Some(idx) = self.cells.get(&key) {
                for &i in idx {
                    let d2 = x.dist2(&self.points[i]);
                    if d2 == 0.0 {
                        return Err(Error::CoincidentPoint(x.coords().to_vec()));
                    }
                    sum += p.at_dist2(d2);
                }
            }
            // odometer over {-1, 0, 1}^d
            let mut k = 0;
            while k < d && offset[k] == 1 {
                offset[k] = -1;
                k += 1;
            }
            if k == d {
                break;
            }
            offset[k] += 1;
        }
        Ok(sum)
    }
}

fn cell_of(p: &Point, side: f64) -> Vec<i64> {
    p.coords()
        .iter()
        .map(|c| (c / side).floor() as i64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::phi_sum_parts;
    use crate::rng::RngState;

    #[test]
    fn agrees_with_direct_sum() {
        let mut rng = RngState::new(11, 0);
        let pts: Vec<Point> = (0..400)
            .map(|_| Point::from_array([rng.uniform() * 3.0, rng.uniform() * 2.0]))
            .collect();
        let pots = [
            PairPotential::step(1.3, 0.25).unwrap(),
            PairPotential::soft_core(0.7, 0.3, 3.0).unwrap(),
            PairPotential::None,
        ];
        let cells = CellList::new(&pts, 0.3).unwrap();
        for _ in 0..200 {
            let x = Point::from_array([rng.uniform() * 3.0, rng.uniform() * 2.0]);
            for p in &pots {
                let direct = phi_sum_parts(p, &x, &[&pts]).unwrap();
                let fast = cells.phi_sum(p, &x).unwrap();
                assert!(
                    (direct - fast).abs() <= 1e-13 * direct.abs().max(1.0),
                    "{direct} vs {fast}"
                );
            }
        }
    }

    #[test]
    fn rejects_range_beyond_cell() {
        let pts = vec![Point::from_array([0.0, 0.0])];
        let cells = CellList::new(&pts, 0.1).unwrap();
        let p = PairPotential::step(1.0, 0.2).unwrap();
        assert!(cells.phi_sum(&p, &Point::from_array([0.5, 0.5])).is_err());
    }

    #[test]
    fn detects_coincidence() {
        let pts = vec![Point::from_array([0.2, 0.2])];
        let cells = CellList::new(&pts, 0.5).unwrap();
        assert!(matches!(
            cells.phi_sum(&PairPotential::None, &Point::from_array([0.2, 0.2])),
            Err(Error::CoincidentPoint(_))
        ));
    }
}

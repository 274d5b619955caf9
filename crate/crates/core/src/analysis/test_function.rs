use std::fmt;

use serde::{Deserialize, Serialize};

use crate::configuration::{Point, Window};
use crate::error::{Error, Result};

/// Which arguments a test function takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arity {
    /// `h(γ⁺, γ⁻, x)`
    PointMarked,
    /// `h(γ⁺, γ⁻, x, y)`
    PairMarked,
    /// `F(γ⁺, γ⁻)`
    Configuration,
}

impl Arity {
    pub fn name(self) -> &'static str {
        match self {
            Arity::PointMarked => "point-marked",
            Arity::PairMarked => "pair-marked",
            Arity::Configuration => "configuration",
        }
    }
}

/// Non-negative test functions with finite moments under the models here.
///
/// Point-marked functions see the configuration from the marked point's
/// side: `own` is the species of `x` (including `x`), `other` the opposite
/// one. The same function therefore serves both species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `1{x ∈ w}`
    InWindow { window: Window },
    /// Number of opposite-species points within `range` of `x`.
    CrossNeighbours { range: f64 },
    /// `1{some opposite-species point lies within range of x}`
    CrossContact { range: f64 },
    /// `exp(c·x − β·(|γ⁺| + |γ⁻|))`
    ExpLinear { beta: f64, coef: Vec<f64> },

    /// `1{x ∈ w, y ∈ w}`
    PairInWindow { window: Window },
    /// `1{|x − y| < range}`
    PairWithin { range: f64 },
    /// `exp(−|x − y|² / ℓ²)`
    PairKernel { length: f64 },
    /// `exp(−β·(|γ⁺| + |γ⁻|))`
    PairExpCount { beta: f64 },

    /// `F ≡ 1`
    One,
    /// `|γ⁺ ∩ w|`
    CountPlus { window: Window },
    /// `|γ⁻ ∩ w|`
    CountMinus { window: Window },
    /// `|γ⁺ ∩ w| + |γ⁻ ∩ w|`
    CountTotal { window: Window },
    /// `exp(−β·(|γ⁺ ∩ w| + |γ⁻ ∩ w|))`
    ExpCount { beta: f64, window: Window },
}

fn count_in(layers: &[&[Point]], w: &Window) -> usize {
    layers
        .iter()
        .map(|l| l.iter().filter(|p| w.contains(p)).count())
        .sum()
}

fn total(layers: &[&[Point]]) -> usize {
    layers.iter().map(|l| l.len()).sum()
}

fn within<'a>(
    layers: &'a [&'a [Point]],
    x: &'a Point,
    range: f64,
) -> impl Iterator<Item = &'a Point> {
    let r2 = range * range;
    layers
        .iter()
        .flat_map(|l| l.iter())
        .filter(move |y| x.dist2(y) < r2)
}

impl TestFunction {
    pub fn id(&self) -> &'static str {
        match self {
            TestFunction::InWindow { .. } => "in-window",
            TestFunction::CrossNeighbours { .. } => "cross-neighbours",
            TestFunction::CrossContact { .. } => "cross-contact",
            TestFunction::ExpLinear { .. } => "exp-linear",
            TestFunction::PairInWindow { .. } => "pair-in-window",
            TestFunction::PairWithin { .. } => "pair-within",
            TestFunction::PairKernel { .. } => "pair-kernel",
            TestFunction::PairExpCount { .. } => "pair-exp-count",
            TestFunction::One => "one",
            TestFunction::CountPlus { .. } => "count-plus",
            TestFunction::CountMinus { .. } => "count-minus",
            TestFunction::CountTotal { .. } => "count-total",
            TestFunction::ExpCount { .. } => "exp-count",
        }
    }

    pub fn arity(&self) -> Arity {
        match self {
            TestFunction::InWindow { .. }
            | TestFunction::CrossNeighbours { .. }
            | TestFunction::CrossContact { .. }
            | TestFunction::ExpLinear { .. } => Arity::PointMarked,
            TestFunction::PairInWindow { .. }
            | TestFunction::PairWithin { .. }
            | TestFunction::PairKernel { .. }
            | TestFunction::PairExpCount { .. } => Arity::PairMarked,
            _ => Arity::Configuration,
        }
    }

    pub fn expect_arity(&self, expected: Arity) -> Result<()> {
        if self.arity() == expected {
            Ok(())
        } else {
            Err(Error::WrongArity {
                id: self.id().to_string(),
                expected: expected.name(),
                got: self.arity().name(),
            })
        }
    }

    /// `h(own, other, x)` for a point-marked function.
    pub fn eval_point(&self, own: &[&[Point]], other: &[&[Point]], x: &Point) -> f64 {
        match self {
            TestFunction::InWindow { window } => f64::from(u8::from(window.contains(x))),
            TestFunction::CrossNeighbours { range } => within(other, x, *range).count() as f64,
            TestFunction::CrossContact { range } => {
                f64::from(u8::from(within(other, x, *range).next().is_some()))
            }
            TestFunction::ExpLinear { beta, coef } => {
                let lin: f64 = coef.iter().zip(x.coords()).map(|(c, v)| c * v).sum();
                (lin - beta * (total(own) + total(other)) as f64).exp()
            }
            _ => panic!("{} is not point-marked", self.id()),
        }
    }

    /// `h(γ⁺, γ⁻, x, y)` for a pair-marked function.
    pub fn eval_pair(&self, plus: &[&[Point]], minus: &[&[Point]], x: &Point, y: &Point) -> f64 {
        match self {
            TestFunction::PairInWindow { window } => {
                f64::from(u8::from(window.contains(x) && window.contains(y)))
            }
            TestFunction::PairWithin { range } => f64::from(u8::from(x.dist(y) < *range)),
            TestFunction::PairKernel { length } => (-x.dist2(y) / (length * length)).exp(),
            TestFunction::PairExpCount { beta } => {
                (-beta * (total(plus) + total(minus)) as f64).exp()
            }
            _ => panic!("{} is not pair-marked", self.id()),
        }
    }

    /// `F(γ⁺, γ⁻)` for a configuration function.
    pub fn eval_config(&self, plus: &[&[Point]], minus: &[&[Point]]) -> f64 {
        match self {
            TestFunction::One => 1.0,
            TestFunction::CountPlus { window } => count_in(plus, window) as f64,
            TestFunction::CountMinus { window } => count_in(minus, window) as f64,
            TestFunction::CountTotal { window } => {
                (count_in(plus, window) + count_in(minus, window)) as f64
            }
            TestFunction::ExpCount { beta, window } => {
                (-beta * (count_in(plus, window) + count_in(minus, window)) as f64).exp()
            }
            _ => panic!("{} is not a configuration function", self.id()),
        }
    }

    /// Parses `id` or `id:p1,p2,...`. Window parameters are given as the
    /// lower corner followed by the upper corner; when omitted, `window` is
    /// used.
    pub fn parse(text: &str, window: &Window) -> Result<Self> {
        let (id, params) = match text.split_once(':') {
            Some((id, rest)) => (id.trim(), parse_numbers(rest)?),
            None => (text.trim(), Vec::new()),
        };
        let d = window.dim();
        let bad = |what: &str| Error::InvalidParameter(format!("test function {id}: {what}"));
        let scalar = |default: f64| -> Result<f64> {
            match params.as_slice() {
                [] => Ok(default),
                [v] if v.is_finite() && *v >= 0.0 => Ok(*v),
                _ => Err(bad("expected one non-negative number")),
            }
        };
        let win = |ps: &[f64]| -> Result<Window> {
            match ps.len() {
                0 => Ok(window.clone()),
                n if n == 2 * d => Window::new(ps[..d].to_vec(), ps[d..].to_vec()),
                _ => Err(bad(&format!("expected {} window coordinates", 2 * d))),
            }
        };
        let f = match id {
            "in-window" => TestFunction::InWindow {
                window: win(&params)?,
            },
            "cross-neighbours" => TestFunction::CrossNeighbours {
                range: scalar(0.1)?,
            },
            "cross-contact" => TestFunction::CrossContact {
                range: scalar(0.1)?,
            },
            "exp-linear" => {
                let (beta, coef) = match params.split_first() {
                    None => (0.1, vec![0.0; d]),
                    Some((b, [])) => (*b, vec![0.0; d]),
                    Some((b, rest)) if rest.len() == d => (*b, rest.to_vec()),
                    _ => return Err(bad(&format!("expected beta and {d} coefficients"))),
                };
                if !(beta >= 0.0) || !beta.is_finite() {
                    return Err(bad("beta must be non-negative"));
                }
                TestFunction::ExpLinear { beta, coef }
            }
            "pair-in-window" => TestFunction::PairInWindow {
                window: win(&params)?,
            },
            "pair-within" => TestFunction::PairWithin {
                range: scalar(0.1)?,
            },
            "pair-kernel" => {
                let length = scalar(0.2)?;
                if length == 0.0 {
                    return Err(bad("length must be positive"));
                }
                TestFunction::PairKernel { length }
            }
            "pair-exp-count" => TestFunction::PairExpCount { beta: scalar(0.1)? },
            "one" if params.is_empty() => TestFunction::One,
            "count-plus" => TestFunction::CountPlus {
                window: win(&params)?,
            },
            "count-minus" => TestFunction::CountMinus {
                window: win(&params)?,
            },
            "count-total" => TestFunction::CountTotal {
                window: win(&params)?,
            },
            "exp-count" => {
                let (beta, rest) = params
                    .split_first()
                    .map_or((0.1, &[][..]), |(b, r)| (*b, r));
                if !(beta >= 0.0) || !beta.is_finite() {
                    return Err(bad("beta must be non-negative"));
                }
                TestFunction::ExpCount {
                    beta,
                    window: win(rest)?,
                }
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown test function {text:?}"
                )))
            }
        };
        Ok(f)
    }
}

fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("not a number: {t:?}")))
        })
        .collect()
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::from_array([x, y])
    }

    #[test]
    fn parse_defaults_and_params() {
        let w = Window::unit(2);
        assert_eq!(TestFunction::parse("one", &w).unwrap(), TestFunction::One);
        assert_eq!(
            TestFunction::parse("cross-neighbours:0.25", &w).unwrap(),
            TestFunction::CrossNeighbours { range: 0.25 }
        );
        let sub = Window::new(vec![0.0, 0.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(
            TestFunction::parse("count-plus:0,0,0.5,0.5", &w).unwrap(),
            TestFunction::CountPlus { window: sub }
        );
        assert!(TestFunction::parse("count-plus:0,0,0.5", &w).is_err());
        assert!(TestFunction::parse("nonsense", &w).is_err());
        assert!(TestFunction::parse("pair-within:-1", &w).is_err());
    }

    #[test]
    fn point_functions_see_opposite_species() {
        let own = [p(0.5, 0.5)];
        let other = [p(0.55, 0.5), p(0.9, 0.9)];
        let x = &own[0];
        let f = TestFunction::CrossNeighbours { range: 0.1 };
        assert_eq!(f.eval_point(&[&own], &[&other], x), 1.0);
        let g = TestFunction::CrossContact { range: 0.01 };
        assert_eq!(g.eval_point(&[&own], &[&other], x), 0.0);
        let e = TestFunction::ExpLinear {
            beta: 0.5,
            coef: vec![2.0, 0.0],
        };
        let want = (2.0 * 0.5 - 0.5 * 3.0f64).exp();
        assert!((e.eval_point(&[&own], &[&other], x) - want).abs() < 1e-15);
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let err = TestFunction::One
            .expect_arity(Arity::PointMarked)
            .unwrap_err();
        assert!(matches!(err, Error::WrongArity { .. }));
    }
}

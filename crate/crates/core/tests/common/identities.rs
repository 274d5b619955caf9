//! One random instance and every exact identity evaluated on it.

use bigibbs::energy::{
    relative_minus, relative_pair, relative_pair_alt, relative_plus, telescoped, telescoped_alt,
    telescoped_minus, telescoped_plus, telescoped_via_pairs,
};
use bigibbs::{
    Configuration, LogDensity, Point, PotentialModel, RngState, TwoComponentConfiguration, Window,
};

use super::{brute_log_r, random_points, total_energy};

pub const TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct Instance {
    pub model: PotentialModel,
    pub g: TwoComponentConfiguration,
    pub x1: Point,
    pub x2: Point,
    pub y1: Point,
    pub y2: Point,
    pub eta1_plus: Configuration,
    pub eta2_plus: Configuration,
    pub eta1_minus: Configuration,
    pub eta2_minus: Configuration,
}

fn take(pool: &mut Vec<Point>, n: usize) -> Configuration {
    let rest = pool.split_off(pool.len() - n);
    Configuration::from_points(rest).unwrap()
}

impl Instance {
    /// `γ` with up to `max_gamma` points per species, four marked points and
    /// four `η` blocks of up to `max_eta` points, all in the unit square.
    pub fn random(
        model: PotentialModel,
        max_gamma: usize,
        max_eta: usize,
        rng: &mut RngState,
    ) -> Instance {
        let w = Window::unit(2);
        let np = rng.index(max_gamma + 1);
        let nm = rng.index(max_gamma + 1);
        let sizes: Vec<usize> = (0..4).map(|_| rng.index(max_eta + 1)).collect();
        let total = np + nm + 4 + sizes.iter().sum::<usize>();
        let mut pool = random_points(&w, total, rng);
        let plus = take(&mut pool, np);
        let minus = take(&mut pool, nm);
        let g = TwoComponentConfiguration::new(plus, minus).unwrap();
        let x1 = pool.pop().unwrap();
        let x2 = pool.pop().unwrap();
        let y1 = pool.pop().unwrap();
        let y2 = pool.pop().unwrap();
        Instance {
            eta1_plus: take(&mut pool, sizes[0]),
            eta2_plus: take(&mut pool, sizes[1]),
            eta1_minus: take(&mut pool, sizes[2]),
            eta2_minus: take(&mut pool, sizes[3]),
            model,
            g,
            x1,
            x2,
            y1,
            y2,
        }
    }
}

fn add(
    g: &TwoComponentConfiguration,
    plus: &[&Point],
    minus: &[&Point],
) -> TwoComponentConfiguration {
    let mut out = g.clone();
    for p in plus {
        out.plus.insert((*p).clone()).unwrap();
    }
    for p in minus {
        out.minus.insert((*p).clone()).unwrap();
    }
    out
}

fn add_conf(
    g: &TwoComponentConfiguration,
    plus: &Configuration,
    minus: &Configuration,
) -> TwoComponentConfiguration {
    TwoComponentConfiguration {
        plus: g.plus.union(plus).unwrap(),
        minus: g.minus.union(minus).unwrap(),
    }
}

/// Reversal of the point order.
fn reversed(c: &Configuration) -> Configuration {
    let perm: Vec<usize> = (0..c.len()).rev().collect();
    c.permuted(&perm)
}

/// Rotation of the point order by one.
fn rotated(c: &Configuration) -> Configuration {
    let n = c.len();
    let perm: Vec<usize> = (0..n).map(|i| (i + 1) % n.max(1)).collect();
    c.permuted(&perm)
}

/// `(identity, lhs, rhs)` for every exact identity on `inst`.
#[allow(clippy::vec_init_then_push)]
pub fn evaluate(inst: &Instance) -> Vec<(&'static str, LogDensity, LogDensity)> {
    let m = &inst.model;
    let g = &inst.g;
    let (x1, x2, y1, y2) = (&inst.x1, &inst.x2, &inst.y1, &inst.y2);
    let (e1p, e2p, e1m, e2m) = (
        &inst.eta1_plus,
        &inst.eta2_plus,
        &inst.eta1_minus,
        &inst.eta2_minus,
    );
    let empty = Configuration::empty();
    let mut out = Vec::new();

    out.push((
        "cocycle-plus",
        relative_plus(m, &add(g, &[x1], &[]), x2).unwrap() * relative_plus(m, g, x1).unwrap(),
        relative_plus(m, &add(g, &[x2], &[]), x1).unwrap() * relative_plus(m, g, x2).unwrap(),
    ));
    out.push((
        "cocycle-minus",
        relative_minus(m, &add(g, &[], &[y1]), y2).unwrap() * relative_minus(m, g, y1).unwrap(),
        relative_minus(m, &add(g, &[], &[y2]), y1).unwrap() * relative_minus(m, g, y2).unwrap(),
    ));
    out.push((
        "balance",
        relative_plus(m, &add(g, &[], &[y1]), x1).unwrap() * relative_minus(m, g, y1).unwrap(),
        relative_minus(m, &add(g, &[x1], &[]), y1).unwrap() * relative_plus(m, g, x1).unwrap(),
    ));
    out.push((
        "pair-cocycle",
        relative_pair(m, &add(g, &[x1], &[y1]), x2, y2).unwrap()
            * relative_pair(m, g, x1, y1).unwrap(),
        relative_pair(m, &add(g, &[x2], &[y2]), x1, y1).unwrap()
            * relative_pair(m, g, x2, y2).unwrap(),
    ));
    out.push((
        "pair-factorization",
        relative_pair(m, g, x1, y1).unwrap(),
        relative_pair_alt(m, g, x1, y1).unwrap(),
    ));

    let ep = e1p.union(e2p).unwrap();
    let em = e1m.union(e2m).unwrap();
    let joint = telescoped(m, g, &ep, &em).unwrap();
    out.push((
        "order-reversed",
        joint,
        telescoped(m, g, &reversed(&ep), &reversed(&em)).unwrap(),
    ));
    out.push((
        "order-rotated",
        joint,
        telescoped(m, g, &rotated(&ep), &rotated(&em)).unwrap(),
    ));
    out.push((
        "order-plus-only",
        telescoped_plus(m, g, &ep).unwrap(),
        telescoped_plus(m, g, &reversed(&ep)).unwrap(),
    ));
    out.push((
        "order-minus-only",
        telescoped_minus(m, g, &em).unwrap(),
        telescoped_minus(m, g, &rotated(&em)).unwrap(),
    ));

    // composition: split η into a first block and a second block
    out.push((
        "compose-plus",
        telescoped(m, g, &ep, e1m).unwrap(),
        telescoped(m, &add_conf(g, e2p, &empty), e1p, e1m).unwrap()
            * telescoped_plus(m, g, e2p).unwrap(),
    ));
    out.push((
        "compose-minus",
        telescoped(m, g, e1p, &em).unwrap(),
        telescoped(m, &add_conf(g, &empty, e2m), e1p, e1m).unwrap()
            * telescoped_minus(m, g, e2m).unwrap(),
    ));
    out.push((
        "compose-joint",
        joint,
        telescoped(m, &add_conf(g, e2p, e2m), e1p, e1m).unwrap()
            * telescoped(m, g, e2p, e2m).unwrap(),
    ));
    out.push((
        "telescoped-balance",
        joint,
        telescoped_alt(m, g, &ep, &em).unwrap(),
    ));

    // pair-product decomposition needs |η⁺| = |η⁻|
    let n = ep.len().min(em.len());
    let ep_n = Configuration::from_points(ep.points()[..n].to_vec()).unwrap();
    let em_n = Configuration::from_points(em.points()[..n].to_vec()).unwrap();
    out.push((
        "pair-product",
        telescoped(m, g, &ep_n, &em_n).unwrap(),
        telescoped_via_pairs(m, g, &ep_n, &em_n).unwrap(),
    ));
    out
}

/// Library `R(γ, η)` against the total-energy difference, for feasible `γ`.
/// Returns `None` when `γ` itself is infeasible.
pub fn against_energy(inst: &Instance) -> Option<(LogDensity, LogDensity, f64)> {
    let m = &inst.model;
    let g = &inst.g;
    let base = total_energy(m, g.plus.points(), g.minus.points());
    if !base.is_finite() {
        return None;
    }
    let ep = inst.eta1_plus.union(&inst.eta2_plus).unwrap();
    let em = inst.eta1_minus.union(&inst.eta2_minus).unwrap();
    let lib = telescoped(m, g, &ep, &em).unwrap();
    let brute = LogDensity::from_log(brute_log_r(m, g, ep.points(), em.points()));
    // the energy difference cancels the energy of γ; scale by it
    Some((lib, brute, base.abs().max(1.0)))
}

/// Log-domain agreement: both `−∞`, or relative difference within `tol`.
pub fn agrees(a: LogDensity, b: LogDensity, tol: f64) -> bool {
    a.approx_eq(b, tol)
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bigibbs::analysis::{
    check_ruelle_bound, correlation_summands, estimate_correlation, marginal_correlation_summands,
    verify_cm_full, verify_cm_minus, verify_cm_plus, verify_ruelle, with_retry, IdentityReport,
    TestFunction,
};
use bigibbs::oracle::{partition_function, rejection_samples, SeriesTruncation};
use bigibbs::sampler::{run, run_chains, ChainSpec};
use bigibbs::stats::{batch_means_std_err, mean, variance, EstimateWithError};
use bigibbs::{
    Configuration, PairPotential, PotentialModel, RngState, TwoComponentConfiguration, Window,
};

use common::identities::{against_energy, evaluate, Instance};
use common::{
    cross_hard_core, cross_step, homogeneous, mixed_repulsive, random_model, random_points,
    support_violations,
};

const SEED: u64 = 20261016;
const IDENTITY_TOL: f64 = 1e-11;
const CORRELATION_TOL: f64 = 1e-12;
const Z_MAX: f64 = 3.0;
const IDENTITY_INSTANCES: usize = 500;
const VERIFY_SAMPLES: u64 = 10_000;
const MCMC_BATCHES: usize = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Every sample set produced by the suite, checked at the end.
#[derive(Default)]
struct Audit {
    samples: usize,
    violations: usize,
}

impl Audit {
    fn record(&mut self, m: &PotentialModel, samples: &[TwoComponentConfiguration]) {
        self.samples += samples.len();
        self.violations += samples
            .iter()
            .map(|g| support_violations(m, g))
            .sum::<usize>();
    }
}

fn unit() -> Window {
    Window::unit(2)
}

fn square(lo: f64, hi: f64) -> Window {
    Window::new(vec![lo, lo], vec![hi, hi]).unwrap()
}

/// Chain with the default thinning and burn-in, long enough for `n` samples.
fn chain(m: &PotentialModel, n: u64, seed: u64) -> Vec<TwoComponentConfiguration> {
    let probe = ChainSpec::new(m.clone(), unit(), 1, seed).unwrap();
    let burnin = bigibbs::sampler::default_burnin(m.intensity.mass(&unit()));
    let spec = ChainSpec {
        steps: burnin + n * probe.thin,
        burnin,
        ..probe
    };
    let out = run(&spec).unwrap();
    assert_eq!(out.len() as u64, n);
    out
}

fn attractive_cross() -> PotentialModel {
    PotentialModel::new(
        PairPotential::step(-0.5, 0.2).unwrap(),
        PairPotential::hard_core(0.05).unwrap(),
        PairPotential::hard_core(0.05).unwrap(),
        homogeneous(1.0),
    )
}

fn eta_catalogue(n: usize, rng: &mut RngState) -> Vec<(Configuration, Configuration)> {
    (0..n)
        .map(|i| {
            let pts = random_points(&unit(), i % 3 + (i + 1) % 3, rng);
            let split = i % 3;
            (
                Configuration::from_points(pts[..split].to_vec()).unwrap(),
                Configuration::from_points(pts[split..].to_vec()).unwrap(),
            )
        })
        .collect()
}

fn criterion_identities() -> Outcome {
    let mut rng = RngState::new(SEED, 1);
    let mut checks = 0usize;
    let mut failures = Vec::new();
    let mut both_zero = 0usize;
    for i in 0..IDENTITY_INSTANCES {
        let m = random_model(&mut rng);
        let inst = Instance::random(m, 8, 4, &mut rng);
        for (name, lhs, rhs) in evaluate(&inst) {
            checks += 1;
            if lhs.is_zero() && rhs.is_zero() {
                both_zero += 1;
            }
            if !lhs.approx_eq(rhs, IDENTITY_TOL) {
                failures.push(format!("#{i} {name}: {} vs {}", lhs.log(), rhs.log()));
            }
        }
        if let Some((lib, brute, scale)) = against_energy(&inst) {
            checks += 1;
            if !lib.approx_eq(brute, IDENTITY_TOL * scale) {
                failures.push(format!("#{i} energy: {} vs {}", lib.log(), brute.log()));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{IDENTITY_INSTANCES} instances, {checks} checks ({both_zero} hard-core zeros), \
             {} failures{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    }
}

fn criterion_free_case(audit: &mut Audit) -> Outcome {
    let m = PotentialModel::free(homogeneous(1.0));
    let spec = ChainSpec::new(m.clone(), unit(), 100_000, SEED).unwrap();
    let samples = run(&spec).unwrap();
    audit.record(&m, &samples);
    let n = samples.len() as f64;
    let mut notes = Vec::new();
    let mut pass = true;
    for (label, counts) in [
        (
            "plus",
            samples
                .iter()
                .map(|g| g.plus.len() as f64)
                .collect::<Vec<_>>(),
        ),
        (
            "minus",
            samples
                .iter()
                .map(|g| g.minus.len() as f64)
                .collect::<Vec<_>>(),
        ),
    ] {
        let mu = mean(&counts);
        let var = variance(&counts);
        // Poisson(1): Var(mean) = 1/n, Var(s²) ≈ (μ₄ − 1)/n = 3/n
        let z_mean = (mu - 1.0) / (1.0 / n).sqrt();
        let z_disp = (var - 1.0) / (3.0 / n).sqrt();
        pass &= z_mean.abs() < Z_MAX && z_disp.abs() < Z_MAX;
        notes.push(format!(
            "{label} mean {mu:.3} (z {z_mean:.2}) var {var:.3} (z {z_disp:.2})"
        ));
    }
    let mut rng = RngState::new(SEED, 2);
    let mut worst = 0.0f64;
    for (ep, em) in eta_catalogue(10, &mut rng) {
        let k = estimate_correlation(&samples, &m, &ep, &em).unwrap();
        let ok = (k.estimate - 1.0).abs() <= Z_MAX * k.std_err + CORRELATION_TOL;
        pass &= ok;
        worst = worst.max((k.estimate - 1.0).abs());
    }
    notes.push(format!("10 eta: max |k - 1| = {worst:.1e}"));
    Outcome {
        pass,
        detail: format!("{} samples; {}", samples.len(), notes.join("; ")),
    }
}

fn cross_pairs(g: &TwoComponentConfiguration, range: f64) -> f64 {
    g.plus
        .iter()
        .map(|x| g.minus.iter().filter(|y| x.dist(y) <= range).count())
        .sum::<usize>() as f64
}

type Statistic = fn(&TwoComponentConfiguration) -> f64;

fn criterion_oracle(audit: &mut Audit) -> Outcome {
    let m = cross_step(0.5);
    let mcmc = chain(&m, VERIFY_SAMPLES, SEED + 3);
    let batch = rejection_samples(
        &m,
        &unit(),
        VERIFY_SAMPLES as usize,
        &RngState::new(SEED, 3),
    )
    .unwrap();
    audit.record(&m, &mcmc);
    audit.record(&m, &batch.samples);
    let stats: [(&str, Statistic); 3] = [
        ("plus", |g| g.plus.len() as f64),
        ("minus", |g| g.minus.len() as f64),
        ("cross pairs", |g| cross_pairs(g, 0.3)),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (label, f) in stats {
        let a: Vec<f64> = mcmc.iter().map(f).collect();
        let b: Vec<f64> = batch.samples.iter().map(f).collect();
        let se_a = batch_means_std_err(&a, MCMC_BATCHES).unwrap();
        let se_b = (variance(&b) / b.len() as f64).sqrt();
        let z = (mean(&a) - mean(&b)) / se_a.hypot(se_b);
        pass &= z.abs() < Z_MAX;
        notes.push(format!("{label} {:.4}/{:.4} z {z:.2}", mean(&a), mean(&b)));
    }
    let rate = batch.acceptance_rate();
    let series = partition_function(
        &m,
        &unit(),
        &SeriesTruncation::new(6, 100_000),
        &RngState::new(SEED, 4),
    )
    .unwrap();
    let gap = (rate.estimate - series.value).abs();
    let allowed = Z_MAX * rate.std_err.hypot(series.mc_std_err) + series.truncation_bound;
    pass &= gap <= allowed;
    notes.push(format!(
        "Z {:.5} vs acceptance {:.5} (gap {gap:.1e} <= {allowed:.1e})",
        series.value, rate.estimate
    ));
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn criterion_campbell_mecke(audit: &mut Audit) -> Outcome {
    let models = [
        ("cross-step", cross_step(1.0)),
        ("mixed-repulsive", mixed_repulsive(1.0)),
        ("attractive-cross", attractive_cross()),
    ];
    let point_fns = [
        TestFunction::InWindow {
            window: square(0.2, 0.8),
        },
        TestFunction::CrossNeighbours { range: 0.25 },
        TestFunction::CrossContact { range: 0.15 },
        TestFunction::ExpLinear {
            beta: 0.2,
            coef: vec![0.5, -0.3],
        },
    ];
    let pair_fns = [
        TestFunction::PairInWindow { window: unit() },
        TestFunction::PairWithin { range: 0.25 },
        TestFunction::PairKernel { length: 0.2 },
        TestFunction::PairExpCount { beta: 0.2 },
    ];
    let mut reports: Vec<(String, IdentityReport)> = Vec::new();
    for (mi, (name, m)) in models.iter().enumerate() {
        let sets: Vec<Vec<TwoComponentConfiguration>> = (0..2)
            .map(|attempt| chain(m, VERIFY_SAMPLES, SEED + 100 * mi as u64 + attempt))
            .collect();
        for s in &sets {
            audit.record(m, s);
        }
        let w = unit();
        for (fi, h) in point_fns.iter().chain(&pair_fns).enumerate() {
            for which in 0..if fi < 4 { 2 } else { 1 } {
                let report = with_retry(|attempt| {
                    let s = &sets[attempt as usize];
                    let rng =
                        RngState::new(SEED + attempt as u64, (mi * 100 + fi * 10 + which) as u64);
                    match (fi < 4, which) {
                        (true, 0) => verify_cm_plus(s, m, &w, h, 4, &rng),
                        (true, _) => verify_cm_minus(s, m, &w, h, 4, &rng),
                        (false, _) => verify_cm_full(s, m, &w, h, 4, &rng),
                    }
                })
                .unwrap();
                reports.push((format!("{name}/{}/{}", report.identity, h.id()), report));
            }
        }
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|(_, r)| !r.pass)
        .map(|(label, r)| format!("{label} z {:.2}", r.z_score))
        .collect();
    let retried = reports.iter().filter(|(_, r)| r.attempts > 1).count();
    let max_z = reports
        .iter()
        .map(|(_, r)| r.z_score.abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: failed.is_empty(),
        detail: format!(
            "{} reports (3 models x 4 point + 4 pair functions), max |z| {max_z:.2}, \
             {retried} retried, failed: [{}]",
            reports.len(),
            failed.join(", ")
        ),
    }
}

fn criterion_ruelle(audit: &mut Audit) -> Outcome {
    let m = mixed_repulsive(1.0);
    let samples = chain(&m, VERIFY_SAMPLES, SEED + 5);
    audit.record(&m, &samples);
    let (sub_plus, sub_minus) = (square(0.0, 0.5), square(0.25, 0.75));
    let rng = RngState::new(SEED, 5);
    let one = verify_ruelle(
        &samples,
        &m,
        &unit(),
        &sub_plus,
        &sub_minus,
        &TestFunction::One,
        8,
        &rng,
    )
    .unwrap();
    let count = TestFunction::CountTotal {
        window: sub_plus.clone(),
    };
    let counted = verify_ruelle(
        &samples,
        &m,
        &unit(),
        &sub_plus,
        &sub_minus,
        &count,
        8,
        &rng.fork(1),
    )
    .unwrap();
    let z_one = (one.rhs.estimate - 1.0) / one.rhs.std_err;
    let pass = one.lhs.estimate == 1.0 && one.pass && z_one.abs() < Z_MAX && counted.pass;
    Outcome {
        pass,
        detail: format!(
            "F=1: rhs {:.4} +- {:.4} (z vs 1: {z_one:.2}); F=count: lhs {:.4} rhs {:.4} z {:.2}",
            one.rhs.estimate,
            one.rhs.std_err,
            counted.lhs.estimate,
            counted.rhs.estimate,
            counted.z_score
        ),
    }
}

fn criterion_correlation(audit: &mut Audit) -> Outcome {
    let models = [
        PotentialModel::free(homogeneous(1.0)),
        cross_step(1.0),
        cross_hard_core(1.0, 0.1),
        mixed_repulsive(1.0),
        attractive_cross(),
    ];
    let mut rng = RngState::new(SEED, 7);
    let catalogue = eta_catalogue(10, &mut rng);
    let empty = Configuration::empty();
    let mut pass = true;
    let mut worst_gap = 0.0f64;
    let mut bound_entries = 0;
    for (i, m) in models.iter().enumerate() {
        let samples = chain(m, 2_000, SEED + 70 + i as u64);
        audit.record(m, &samples);
        for (ep, _) in &catalogue {
            let joint = correlation_summands(&samples, m, ep, &empty).unwrap();
            let marginal = marginal_correlation_summands(&samples, m, ep).unwrap();
            for (a, b) in joint.iter().zip(&marginal) {
                let gap = (a - b).abs() / a.abs().max(1.0);
                worst_gap = worst_gap.max(gap);
                pass &= gap <= CORRELATION_TOL;
            }
        }
        let k0 = estimate_correlation(&samples, m, &empty, &empty).unwrap();
        pass &= k0 == EstimateWithError::exact(1.0, samples.len());
        if m.is_nonnegative() {
            let report = check_ruelle_bound(&samples, m, &unit(), &catalogue).unwrap();
            bound_entries += report.entries.len();
            pass &= report.pass;
        }
    }
    Outcome {
        pass,
        detail: format!(
            "marginal vs joint max gap {worst_gap:.1e}; k(0,0) = 1 exactly; \
             Ruelle bound on {bound_entries} (model, eta) pairs"
        ),
    }
}

fn jsonl(samples: &[TwoComponentConfiguration]) -> Vec<u8> {
    let mut out = Vec::new();
    for s in samples {
        out.extend(serde_json::to_vec(s).unwrap());
        out.push(b'\n');
    }
    out
}

fn criterion_determinism(audit: &mut Audit) -> Outcome {
    let m = mixed_repulsive(2.0);
    let spec = ChainSpec::new(m.clone(), unit(), 50_000, SEED + 8)
        .unwrap()
        .with_thin(20);
    let produce = || {
        let chains = run_chains(&spec, 3).unwrap();
        let exact = rejection_samples(&m, &unit(), 300, &RngState::new(SEED, 8)).unwrap();
        let h = TestFunction::CrossNeighbours { range: 0.2 };
        let report =
            verify_cm_plus(&chains.samples, &m, &unit(), &h, 4, &RngState::new(SEED, 9)).unwrap();
        let z = partition_function(
            &m,
            &unit(),
            &SeriesTruncation::new(3, 500),
            &RngState::new(SEED, 10),
        )
        .unwrap();
        let mut bytes = jsonl(&chains.samples);
        bytes.extend(jsonl(&exact.samples));
        bytes.extend(serde_json::to_vec(&report).unwrap());
        bytes.extend(serde_json::to_vec(&z).unwrap());
        (bytes, chains.samples)
    };
    let (a, samples) = produce();
    let (b, _) = produce();
    audit.record(&m, &samples);
    Outcome {
        pass: a == b,
        detail: format!("two runs, {} bytes each, identical: {}", a.len(), a == b),
    }
}

fn main() -> ExitCode {
    let mut audit = Audit::default();
    let mut results: Vec<(u8, &str, Option<Duration>, Outcome, Duration)> = Vec::new();
    let mut timed = |id: u8, name: &'static str, limit_s: u64, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        results.push((
            id,
            name,
            Some(Duration::from_secs(limit_s)),
            outcome,
            start.elapsed(),
        ));
    };
    timed(1, "algebraic identities", 10, &mut criterion_identities);
    timed(2, "free-case reduction", 30, &mut || {
        criterion_free_case(&mut audit)
    });
    timed(3, "oracle cross-validation", 120, &mut || {
        criterion_oracle(&mut audit)
    });
    timed(4, "Campbell-Mecke identities", 120, &mut || {
        criterion_campbell_mecke(&mut audit)
    });
    timed(5, "Ruelle-type identity", 120, &mut || {
        criterion_ruelle(&mut audit)
    });
    timed(7, "correlation consistency", 120, &mut || {
        criterion_correlation(&mut audit)
    });
    timed(8, "determinism", 120, &mut || {
        criterion_determinism(&mut audit)
    });
    let support = Outcome {
        pass: audit.violations == 0 && audit.samples > 0,
        detail: format!(
            "{} sampled configurations audited, {} disjointness/hard-core violations",
            audit.samples, audit.violations
        ),
    };
    results.push((6, "support properties", None, support, Duration::ZERO));
    results.sort_by_key(|r| r.0);

    let mut all = true;
    for (id, name, limit, outcome, elapsed) in &results {
        let in_time = limit.is_none_or(|l| *elapsed <= l);
        let pass = outcome.pass && in_time;
        all &= pass;
        let timing = match limit {
            Some(l) => format!("{:.1} s, limit {} s", elapsed.as_secs_f64(), l.as_secs()),
            None => "over all suites".to_string(),
        };
        println!(
            "{} [{id}] {name}: {} ({timing})",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
        );
    }
    if all {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}

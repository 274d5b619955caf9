//! Argument parsing and the four commands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use bigibbs::analysis::{
    check_balance, check_cocycle, check_pair_product, check_ruelle_bound, estimate_correlation,
    verify_cm_full, verify_cm_minus, verify_cm_plus, verify_ruelle, with_retry, AlgebraicReport,
    Arity, IdentityReport, ALGEBRAIC_TOL,
};
use bigibbs::oracle::{exact_correlation, partition_function, rejection_samples, SeriesTruncation};
use bigibbs::sampler::run_chains;
use bigibbs::{Configuration, Error, Point, RngState, TwoComponentConfiguration};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::{parse_config_with, ExperimentConfig};
use crate::output::{
    jsonl_bytes, read_samples, sidecar, write_atomic, write_json, OutputEntry, RunManifest,
};
use crate::{CliError, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION_FAILED};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Random streams of the non-sampler commands, forked from `(seed, 0)`.
const ORACLE_STREAM: u64 = 0x6f72_6163;
const VERIFY_STREAM: u64 = 0x7665_7269;
const CATALOGUE_STREAM: u64 = 0x6361_7461;

#[derive(Debug, Parser)]
#[command(
    name = "bigibbs",
    version,
    about = "Simulate two-species Gibbs point processes and check their identities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run birth-death chains and write thinned samples as JSONL.
    Sample(SampleArgs),
    /// Exact reference answers for non-negative models.
    Oracle(OracleArgs),
    /// Statistical or exact check of one identity.
    Verify(VerifyArgs),
    /// Estimate correlation functions from samples and write CSV.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment config (TOML, or JSON when it starts with `{`).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Manifest path; defaults to `<out>.manifest.json` next to the output.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub burnin: Option<u64>,
    #[arg(long)]
    pub thin: Option<u64>,
    #[arg(long)]
    pub chains: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleTarget {
    Partition,
    Correlate,
    Sample,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub target: OracleTarget,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub mc_per_term: Option<usize>,
    /// Number of exact draws for `oracle sample`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Points as `x,y;x,y`.
    #[arg(long, allow_hyphen_values = true)]
    pub eta_plus: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta_minus: Option<String>,
    /// Result file; printed to stdout when absent (required for `sample`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    CmPlus,
    CmMinus,
    CmFull,
    Ruelle,
    RuelleBound,
    Cocycle,
    Balance,
    RProduct,
}

impl Identity {
    fn name(self) -> &'static str {
        match self {
            Identity::CmPlus => "cm-plus",
            Identity::CmMinus => "cm-minus",
            Identity::CmFull => "cm-full",
            Identity::Ruelle => "ruelle",
            Identity::RuelleBound => "ruelle-bound",
            Identity::Cocycle => "cocycle",
            Identity::Balance => "balance",
            Identity::RProduct => "r-product",
        }
    }

    fn needs_samples(self) -> bool {
        matches!(
            self,
            Identity::CmPlus
                | Identity::CmMinus
                | Identity::CmFull
                | Identity::Ruelle
                | Identity::RuelleBound
        )
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub identity: Identity,
    #[command(flatten)]
    pub common: Common,
    /// JSONL samples from `sample` or `oracle sample`.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Test function `id[:p1,p2,...]`; defaults to the config choice.
    #[arg(long)]
    pub h: Option<String>,
    /// Random instances for the exact identities.
    #[arg(long)]
    pub instances: Option<usize>,
    /// `η` catalogue for `ruelle-bound`, one pair per repetition.
    #[arg(long, allow_hyphen_values = true)]
    pub eta_plus: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta_minus: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub samples: PathBuf,
    /// Points as `x,y;x,y`; repeat for several `η`.
    #[arg(long, allow_hyphen_values = true)]
    pub eta_plus: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta_minus: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

/// What a finished command leaves behind.
struct Completed {
    config: ExperimentConfig,
    outputs: Vec<OutputEntry>,
    manifest: Option<PathBuf>,
    passed: bool,
    summary: String,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code: 0 success, 1 identity violated after retry, 2 usage or
/// config error.
pub fn run_command<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let start = Instant::now();
    let done = match execute(cli.command) {
        Ok(done) => done,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let code = if done.passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION_FAILED
    };
    if let Some(path) = &done.manifest {
        let manifest = RunManifest {
            tool: "bigibbs".into(),
            version: VERSION.into(),
            command: argv
                .iter()
                .map(|a| a.to_string_lossy().into_owned())
                .collect(),
            seed: done.config.seed,
            config: done.config.to_json(),
            wall_clock_seconds: start.elapsed().as_secs_f64(),
            exit_code: code,
            outputs: done.outputs.clone(),
        };
        if let Err(e) = manifest.write(path) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    println!("{}", done.summary);
    if !done.passed {
        eprintln!("verification failed");
    }
    code
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("BIGIBBS_THREADS") else {
        return Ok(());
    };
    let n: usize = text.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "BIGIBBS_THREADS must be a positive integer, got {text:?}"
        ))
    })?;
    // fails only if a pool already exists, which then stays in charge
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn execute(command: Command) -> Result<Completed, CliError> {
    match command {
        Command::Sample(a) => sample(a),
        Command::Oracle(a) => oracle(a),
        Command::Verify(a) => verify(a),
        Command::Correlate(a) => correlate(a),
    }
}

fn load(common: &Common, mut overrides: Vec<(&str, Value)>) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(&common.config).map_err(|source| CliError::Io {
        path: common.config.clone(),
        source,
    })?;
    if let Some(seed) = common.seed {
        overrides.push(("seed", Value::from(seed)));
    }
    parse_config_with(&text, &overrides).map_err(|errors| CliError::Config {
        path: common.config.clone(),
        errors,
    })
}

fn some<T: Into<Value>>(key: &'static str, v: Option<T>) -> Option<(&'static str, Value)> {
    v.map(|v| (key, v.into()))
}

/// Every JSON output carries the tool, the command, the seed and the full
/// config echo.
fn envelope(command: &str, config: &ExperimentConfig, result: Value) -> Value {
    json!({
        "tool": "bigibbs",
        "version": VERSION,
        "command": command,
        "seed": config.seed,
        "config": config.to_json(),
        "result": result,
    })
}

fn entry(path: &Path, kind: &str) -> OutputEntry {
    OutputEntry {
        path: path.to_path_buf(),
        kind: kind.into(),
    }
}

fn manifest_path(common: &Common, primary: Option<&Path>) -> Option<PathBuf> {
    common
        .manifest
        .clone()
        .or_else(|| primary.map(|p| sidecar(p, "manifest.json")))
}

/// Writes `doc` to `out`, or prints it when there is no output file.
fn emit(
    out: Option<&Path>,
    kind: &str,
    doc: &Value,
    outputs: &mut Vec<OutputEntry>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_json(path, doc)?;
            outputs.push(entry(path, kind));
        }
        None => println!(
            "{}",
            serde_json::to_string_pretty(doc).expect("json serializes")
        ),
    }
    Ok(())
}

fn sample(a: SampleArgs) -> Result<Completed, CliError> {
    let overrides = [
        some("sampler.steps", a.steps),
        some("sampler.burnin", a.burnin),
        some("sampler.thin", a.thin),
        some("sampler.chains", a.chains),
    ];
    let config = load(&a.common, overrides.into_iter().flatten().collect())?;
    let spec = config.chain_spec()?;
    let out = run_chains(&spec, config.sampler.chains)?;
    write_atomic(&a.out, &jsonl_bytes(&out.samples))?;
    let n = out.samples.len() as f64;
    let mean = |f: fn(&TwoComponentConfiguration) -> usize| {
        out.samples.iter().map(|g| f(g) as f64).sum::<f64>() / n.max(1.0)
    };
    let stats = json!({
        "samples_file": a.out,
        "n_samples": out.samples.len(),
        "chains": config.sampler.chains,
        "acceptance": out.stats,
        "overall_acceptance_rate": out.stats.overall_rate(),
        "mean_plus_count": mean(|g| g.plus.len()),
        "mean_minus_count": mean(|g| g.minus.len()),
    });
    let stats_path = sidecar(&a.out, "stats.json");
    write_json(&stats_path, &envelope("sample", &config, stats))?;
    Ok(Completed {
        summary: format!(
            "wrote {} samples to {} (acceptance {:.3})",
            out.samples.len(),
            a.out.display(),
            out.stats.overall_rate()
        ),
        outputs: vec![entry(&a.out, "samples"), entry(&stats_path, "sample-stats")],
        manifest: manifest_path(&a.common, Some(&a.out)),
        config,
        passed: true,
    })
}

/// Parses `x,y;x,y` into a configuration of `dimension`-dimensional points.
/// A repeated point is reported as a coincidence.
pub fn parse_points(text: &str, dimension: usize) -> Result<Configuration, CliError> {
    let mut points = Vec::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let coords = part
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|_| CliError::Usage(format!("cannot parse point {part:?}")))?;
        if coords.len() != dimension {
            return Err(CliError::Usage(format!(
                "point {part:?} has {} coordinates, expected {dimension}",
                coords.len()
            )));
        }
        points.push(Point::new(coords)?);
    }
    Configuration::from_points(points).map_err(|e| match e {
        Error::DuplicatePoint(p) => CliError::Library(Error::CoincidentPoint(p)),
        other => CliError::Library(other),
    })
}

/// `η` pairs from repeated flags. A side that is never given is empty.
fn eta_pairs(
    plus: &[String],
    minus: &[String],
    config: &ExperimentConfig,
) -> Result<Vec<(Configuration, Configuration)>, CliError> {
    let n = plus.len().max(minus.len());
    if !plus.is_empty() && !minus.is_empty() && plus.len() != minus.len() {
        return Err(CliError::Usage(format!(
            "--eta-plus given {} times but --eta-minus {} times",
            plus.len(),
            minus.len()
        )));
    }
    let window = config.window();
    (0..n)
        .map(|i| {
            let side = |v: &[String]| match v.get(i) {
                Some(t) => parse_points(t, config.dimension),
                None => Ok(Configuration::empty()),
            };
            let (ep, em) = (side(plus)?, side(minus)?);
            if let Some(p) = ep.iter().chain(em.iter()).find(|p| !window.contains(p)) {
                return Err(CliError::Usage(format!(
                    "eta point {:?} lies outside the window",
                    p.coords()
                )));
            }
            if let Some(p) = ep.iter().find(|p| em.contains(p)) {
                return Err(CliError::Library(Error::CoincidentPoint(
                    p.coords().to_vec(),
                )));
            }
            Ok((ep, em))
        })
        .collect()
}

fn eta_json(ep: &Configuration, em: &Configuration) -> Value {
    json!({ "plus": ep, "minus": em })
}

fn oracle(a: OracleArgs) -> Result<Completed, CliError> {
    let overrides = [
        some("oracle.n_max", a.nmax),
        some("oracle.mc_per_term", a.mc_per_term),
        some("oracle.samples", a.n),
    ];
    let config = load(&a.common, overrides.into_iter().flatten().collect())?;
    let (m, w) = (config.model(), config.window());
    let rng = RngState::new(config.seed, 0).fork(ORACLE_STREAM);
    let t = SeriesTruncation::new(config.oracle.n_max, config.oracle.mc_per_term);
    let settings = json!({
        "n_max": t.n_max,
        "mc_per_term": t.mc_points_per_term,
        "seed": config.seed,
    });
    let mut outputs = Vec::new();
    let summary = match a.target {
        OracleTarget::Partition => {
            if a.eta_plus.is_some() || a.eta_minus.is_some() {
                return Err(CliError::Usage(
                    "oracle partition takes no --eta-plus/--eta-minus".into(),
                ));
            }
            let r = partition_function(&m, &w, &t, &rng)?;
            let doc = envelope("oracle partition", &config, oracle_json(&r, &settings));
            emit(a.out.as_deref(), "oracle-result", &doc, &mut outputs)?;
            format!(
                "Z = {} (truncation bound {:.2e}, mc stderr {:.2e})",
                r.value, r.truncation_bound, r.mc_std_err
            )
        }
        OracleTarget::Correlate => {
            let plus: Vec<String> = a.eta_plus.iter().cloned().collect();
            let minus: Vec<String> = a.eta_minus.iter().cloned().collect();
            let (ep, em) = eta_pairs(&plus, &minus, &config)?
                .into_iter()
                .next()
                .unwrap_or_default();
            let r = exact_correlation(&m, &w, &ep, &em, &t, &rng)?;
            let mut result = oracle_json(&r, &settings);
            result["eta"] = eta_json(&ep, &em);
            let doc = envelope("oracle correlate", &config, result);
            emit(a.out.as_deref(), "oracle-result", &doc, &mut outputs)?;
            format!(
                "k = {} (truncation bound {:.2e}, mc stderr {:.2e})",
                r.value, r.truncation_bound, r.mc_std_err
            )
        }
        OracleTarget::Sample => {
            let Some(out) = &a.out else {
                return Err(CliError::Usage("oracle sample requires --out".into()));
            };
            let batch = rejection_samples(&m, &w, config.oracle.samples, &rng)?;
            write_atomic(out, &jsonl_bytes(&batch.samples))?;
            outputs.push(entry(out, "samples"));
            let rate = batch.acceptance_rate();
            let stats = json!({
                "samples_file": out,
                "n_samples": batch.samples.len(),
                "attempts": batch.attempts,
                "acceptance_rate": rate,
            });
            let stats_path = sidecar(out, "stats.json");
            write_json(&stats_path, &envelope("oracle sample", &config, stats))?;
            outputs.push(entry(&stats_path, "sample-stats"));
            format!(
                "wrote {} exact samples to {} (acceptance rate {:.4})",
                batch.samples.len(),
                out.display(),
                rate.estimate
            )
        }
    };
    Ok(Completed {
        summary,
        manifest: manifest_path(&a.common, a.out.as_deref()),
        outputs,
        config,
        passed: true,
    })
}

fn oracle_json(r: &bigibbs::oracle::OracleResult, settings: &Value) -> Value {
    json!({
        "value": r.value,
        "truncation_bound": r.truncation_bound,
        "mc_stderr": r.mc_std_err,
        "settings": settings,
    })
}

fn identity_json(r: &IdentityReport, samples: &Path) -> Value {
    json!({
        "identity": r.identity,
        "test_function": r.test_function,
        "samples_file": samples,
        "n_samples": r.lhs.n_samples,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "stderr": r.pooled_std_err,
        "z": r.z_score,
        "pass": r.pass,
        "degenerate": r.degenerate,
        "attempts": r.attempts,
    })
}

fn algebraic_json(r: &AlgebraicReport) -> Value {
    json!({
        "identity": r.identity,
        "instances": r.instances,
        "failures": r.failures,
        "max_discrepancy": r.max_discrepancy,
        "tolerance": ALGEBRAIC_TOL,
        "pass": r.pass,
    })
}

/// Random `η` pairs with up to two points per species.
fn random_catalogue(config: &ExperimentConfig) -> Vec<(Configuration, Configuration)> {
    let w = config.window();
    let mut rng = RngState::new(config.seed, 0).fork(CATALOGUE_STREAM);
    (0..config.verify.eta_catalogue)
        .map(|_| loop {
            let draw = |rng: &mut RngState| {
                let n = rng.index(3);
                Configuration::from_points((0..n).map(|_| w.sample_uniform(rng)).collect())
            };
            if let (Ok(ep), Ok(em)) = (draw(&mut rng), draw(&mut rng)) {
                if ep.iter().all(|p| !em.contains(p)) {
                    break (ep, em);
                }
            }
        })
        .collect()
}

fn verify(a: VerifyArgs) -> Result<Completed, CliError> {
    let overrides = [some("verify.instances", a.instances)];
    let config = load(&a.common, overrides.into_iter().flatten().collect())?;
    let identity = a.identity;
    let samples_path = match (&a.samples, identity.needs_samples()) {
        (Some(p), true) => Some(p.clone()),
        (None, true) => {
            return Err(CliError::Usage(format!(
                "verify {} requires --samples",
                identity.name()
            )))
        }
        (Some(_), false) => {
            return Err(CliError::Usage(format!(
                "verify {} does not use --samples",
                identity.name()
            )))
        }
        (None, false) => None,
    };
    if a.h.is_some()
        && !matches!(
            identity,
            Identity::CmPlus | Identity::CmMinus | Identity::CmFull | Identity::Ruelle
        )
    {
        return Err(CliError::Usage(format!(
            "verify {} takes no --h",
            identity.name()
        )));
    }
    if (!a.eta_plus.is_empty() || !a.eta_minus.is_empty()) && identity != Identity::RuelleBound {
        return Err(CliError::Usage(
            "--eta-plus/--eta-minus apply to ruelle-bound only".into(),
        ));
    }
    let (m, w) = (config.model(), config.window());
    let v = &config.verify;
    let base = RngState::new(config.seed, 0).fork(VERIFY_STREAM);
    let samples = match &samples_path {
        Some(p) => read_samples(p, config.dimension)?,
        None => Vec::new(),
    };
    let h = a.h.as_deref();
    let attempts = |check: &dyn Fn(&RngState) -> bigibbs::Result<IdentityReport>| {
        if v.retry {
            with_retry(|attempt| check(&base.fork(attempt as u64)))
        } else {
            check(&base.fork(0))
        }
    };
    let (result, passed, summary) = match identity {
        Identity::CmPlus | Identity::CmMinus | Identity::CmFull => {
            let arity = if identity == Identity::CmFull {
                Arity::PairMarked
            } else {
                Arity::PointMarked
            };
            let f = config.test_function(arity, h)?;
            let r = attempts(&|rng| match identity {
                Identity::CmPlus => verify_cm_plus(&samples, &m, &w, &f, v.sigma_points, rng),
                Identity::CmMinus => verify_cm_minus(&samples, &m, &w, &f, v.sigma_points, rng),
                _ => verify_cm_full(&samples, &m, &w, &f, v.sigma_points, rng),
            })?;
            (
                identity_json(&r, samples_path.as_deref().expect("checked")),
                r.pass,
                report_line(&r),
            )
        }
        Identity::Ruelle => {
            let f = config.test_function(Arity::Configuration, h)?;
            let (sp, sm) = (v.sub_plus.to_window()?, v.sub_minus.to_window()?);
            let r =
                attempts(&|rng| verify_ruelle(&samples, &m, &w, &sp, &sm, &f, v.inner_draws, rng))?;
            let mut doc = identity_json(&r, samples_path.as_deref().expect("checked"));
            doc["sub_plus"] = json!(v.sub_plus);
            doc["sub_minus"] = json!(v.sub_minus);
            (doc, r.pass, report_line(&r))
        }
        Identity::RuelleBound => {
            let catalogue = if a.eta_plus.is_empty() && a.eta_minus.is_empty() {
                random_catalogue(&config)
            } else {
                eta_pairs(&a.eta_plus, &a.eta_minus, &config)?
            };
            let r = check_ruelle_bound(&samples, &m, &w, &catalogue)?;
            let failed = r.entries.iter().filter(|e| !e.pass).count();
            let summary = format!(
                "ruelle-bound: {} eta, bound {:.4}, {failed} above: {}",
                r.entries.len(),
                r.entries.first().map_or(f64::NAN, |e| e.bound),
                if r.pass { "PASS" } else { "FAIL" }
            );
            let mut doc = serde_json::to_value(&r).expect("report serializes");
            doc["identity"] = json!("ruelle-bound");
            doc["samples_file"] = json!(samples_path);
            (doc, r.pass, summary)
        }
        Identity::Cocycle | Identity::Balance | Identity::RProduct => {
            let mut rng = base.clone();
            let r = match identity {
                Identity::Cocycle => check_cocycle(&m, &w, v.instances, v.max_points, &mut rng)?,
                Identity::Balance => check_balance(&m, &w, v.instances, v.max_points, &mut rng)?,
                _ => check_pair_product(&m, &w, v.instances, v.max_points, v.max_eta, &mut rng)?,
            };
            let summary = format!(
                "{}: {} instances, {} failures, max discrepancy {:.2e}: {}",
                r.identity,
                r.instances,
                r.failures,
                r.max_discrepancy,
                if r.pass { "PASS" } else { "FAIL" }
            );
            (algebraic_json(&r), r.pass, summary)
        }
    };
    let doc = envelope(&format!("verify {}", identity.name()), &config, result);
    let mut outputs = Vec::new();
    emit(a.out.as_deref(), "report", &doc, &mut outputs)?;
    Ok(Completed {
        summary,
        manifest: manifest_path(&a.common, a.out.as_deref()),
        outputs,
        config,
        passed,
    })
}

fn report_line(r: &IdentityReport) -> String {
    format!(
        "{} [{}]: lhs {:.6} rhs {:.6} stderr {:.2e} z {:.2}{}: {}",
        r.identity,
        r.test_function,
        r.lhs.estimate,
        r.rhs.estimate,
        r.pooled_std_err,
        r.z_score,
        if r.degenerate { " (degenerate)" } else { "" },
        if r.pass { "PASS" } else { "FAIL" }
    )
}

fn correlate(a: CorrelateArgs) -> Result<Completed, CliError> {
    let config = load(&a.common, Vec::new())?;
    if a.eta_plus.is_empty() && a.eta_minus.is_empty() {
        return Err(CliError::Usage(
            "correlate needs --eta-plus and/or --eta-minus".into(),
        ));
    }
    let pairs = eta_pairs(&a.eta_plus, &a.eta_minus, &config)?;
    let samples = read_samples(&a.samples, config.dimension)?;
    let m = config.model();
    let mut csv = String::from("eta_id,estimate,std_err,n_samples\n");
    let mut etas = Vec::new();
    for (i, (ep, em)) in pairs.iter().enumerate() {
        let k = estimate_correlation(&samples, &m, ep, em)?;
        csv.push_str(&format!(
            "{i},{},{},{}\n",
            k.estimate, k.std_err, k.n_samples
        ));
        let mut e = eta_json(ep, em);
        e["eta_id"] = json!(i);
        etas.push(e);
    }
    write_atomic(&a.out, csv.as_bytes())?;
    let meta = json!({
        "table": a.out,
        "samples_file": a.samples,
        "n_samples": samples.len(),
        "etas": etas,
    });
    let meta_path = sidecar(&a.out, "meta.json");
    write_json(&meta_path, &envelope("correlate", &config, meta))?;
    Ok(Completed {
        summary: format!(
            "wrote {} correlation estimates to {}",
            pairs.len(),
            a.out.display()
        ),
        outputs: vec![
            entry(&a.out, "correlations"),
            entry(&meta_path, "correlation-meta"),
        ],
        manifest: manifest_path(&a.common, Some(&a.out)),
        config,
        passed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        let c = parse_points("0.5,0.5; 0.1,0.2;", 2).unwrap();
        assert_eq!(c.len(), 2);
        assert!(parse_points("", 2).unwrap().is_empty());
        assert!(matches!(parse_points("0.5", 2), Err(CliError::Usage(_))));
        assert!(matches!(parse_points("a,b", 2), Err(CliError::Usage(_))));
        let dup = parse_points("0.5,0.5;0.5,0.5", 2).unwrap_err();
        assert!(matches!(dup, CliError::Library(Error::CoincidentPoint(_))));
        assert!(dup.to_string().contains("coincident"));
    }

    #[test]
    fn identity_names() {
        assert_eq!(Identity::RProduct.name(), "r-product");
        assert_eq!(Identity::CmPlus.name(), "cm-plus");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

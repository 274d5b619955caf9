//! Experiment configuration: TOML (or JSON) text in, a validated
//! [`ExperimentConfig`] with every default spelled out.

use std::fmt;

use bigibbs::analysis::{Arity, TestFunction};
use bigibbs::sampler::{default_burnin, ChainSpec, DEFAULT_THIN};
use bigibbs::{Density, IntensityMeasure, PairPotential, PotentialModel, Window};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

pub const DEFAULT_STEPS: u64 = 100_000;
pub const DEFAULT_QUADRATURE: usize = bigibbs::intensity::DEFAULT_QUADRATURE_RESOLUTION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IssueKind {
    ParseError,
    ValidationError,
}

/// One problem found in a config text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigIssue {
    pub kind: IssueKind,
    /// Dotted key path such as `intensity.z`; empty for syntax errors.
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.line) {
            (IssueKind::ParseError, Some(line)) => {
                write!(f, "ParseError at line {line}: {}", self.message)
            }
            (IssueKind::ParseError, None) => write!(f, "ParseError: {}", self.message),
            (IssueKind::ValidationError, _) => {
                write!(f, "ValidationError in {}: {}", self.field, self.message)
            }
        }
    }
}

/// Every issue found, in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl ConfigErrors {
    pub fn fields(&self) -> Vec<&str> {
        self.0.iter().map(|i| i.field.as_str()).collect()
    }
}

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  {issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Interaction strength; `+∞` is written `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude(pub f64);

impl Serialize for Amplitude {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Amplitude {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Amplitude(v)),
            Raw::Text(t) if is_inf_text(&t) => Ok(Amplitude(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {t:?}"
            ))),
        }
    }
}

fn is_inf_text(t: &str) -> bool {
    matches!(t.trim(), "inf" | "+inf" | "infinity" | "+infinity")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl WindowSpec {
    pub fn to_window(&self) -> bigibbs::Result<Window> {
        Window::new(self.lower.clone(), self.upper.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityKind {
    #[serde(rename = "constant")]
    Constant,
    #[serde(rename = "linear-x1")]
    LinearX1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensitySpec {
    pub z: f64,
    pub density: DensityKind,
    pub quadrature_resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    None,
    Step,
    Hardcore,
    SoftCore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<Amplitude>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

impl PotentialSpec {
    pub fn none() -> Self {
        PotentialSpec {
            kind: PotentialKind::None,
            amplitude: None,
            range: None,
            exponent: None,
        }
    }

    pub fn to_potential(&self) -> bigibbs::Result<PairPotential> {
        let amplitude = self.amplitude.map_or(f64::NAN, |a| a.0);
        let range = self.range.unwrap_or(f64::NAN);
        match self.kind {
            PotentialKind::None => Ok(PairPotential::None),
            PotentialKind::Step => PairPotential::step(amplitude, range),
            PotentialKind::Hardcore => PairPotential::hard_core(range),
            PotentialKind::SoftCore => {
                PairPotential::soft_core(amplitude, range, self.exponent.unwrap_or(f64::NAN))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpecs {
    pub cross: PotentialSpec,
    pub self_plus: PotentialSpec,
    pub self_minus: PotentialSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub steps: u64,
    pub burnin: u64,
    pub thin: u64,
    pub chains: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub n_max: usize,
    pub mc_per_term: usize,
    /// Draws written by `oracle sample`.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub point_function: String,
    pub pair_function: String,
    pub configuration_function: String,
    /// σ-draws per sample for the Campbell–Mecke integrals.
    pub sigma_points: usize,
    /// Lebesgue–Poisson draws per sample for the Ruelle-type integral.
    pub inner_draws: usize,
    pub sub_plus: WindowSpec,
    pub sub_minus: WindowSpec,
    pub retry: bool,
    pub instances: usize,
    pub max_points: usize,
    pub max_eta: usize,
    /// Random `η` pairs for `ruelle-bound` when none are given.
    pub eta_catalogue: usize,
}

/// A validated experiment. Every field is explicit: the echo written next
/// to each output reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub seed: u64,
    pub window: WindowSpec,
    pub intensity: IntensitySpec,
    pub potential: PotentialSpecs,
    pub sampler: SamplerSpec,
    pub oracle: OracleSpec,
    pub verify: VerifySpec,
}

impl ExperimentConfig {
    pub fn window(&self) -> Window {
        self.window.to_window().expect("validated window")
    }

    pub fn intensity(&self) -> IntensityMeasure {
        let i = &self.intensity;
        intensity_measure(i.z, i.density, i.quadrature_resolution)
    }

    pub fn model(&self) -> PotentialModel {
        let p = &self.potential;
        PotentialModel::new(
            p.cross.to_potential().expect("validated potential"),
            p.self_plus.to_potential().expect("validated potential"),
            p.self_minus.to_potential().expect("validated potential"),
            self.intensity(),
        )
    }

    pub fn chain_spec(&self) -> bigibbs::Result<ChainSpec> {
        let s = &self.sampler;
        let spec = ChainSpec::new(self.model(), self.window(), s.steps, self.seed)?
            .with_burnin(s.burnin)
            .with_thin(s.thin);
        spec.validate()?;
        Ok(spec)
    }

    /// Test function of the given arity: `text` if given, else the
    /// configured default.
    pub fn test_function(&self, arity: Arity, text: Option<&str>) -> bigibbs::Result<TestFunction> {
        let v = &self.verify;
        let text = text.unwrap_or(match arity {
            Arity::PointMarked => &v.point_function,
            Arity::PairMarked => &v.pair_function,
            Arity::Configuration => &v.configuration_function,
        });
        let f = TestFunction::parse(text, &self.window())?;
        f.expect_arity(arity)?;
        Ok(f)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Parses and validates a config. Text starting with `{` is read as JSON,
/// anything else as TOML. All issues are reported, not just the first.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    parse_config_with(text, &[])
}

/// [`parse_config`] with `(dotted.path, value)` overrides applied before
/// validation, so derived defaults see them.
pub fn parse_config_with(
    text: &str,
    overrides: &[(&str, Value)],
) -> Result<ExperimentConfig, ConfigErrors> {
    let mut root = parse_value(text)?;
    for (path, value) in overrides {
        set_path(&mut root, path, value.clone());
    }
    let mut v = Validator::default();
    let config = v.build(&root);
    if v.issues.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(v.issues))
    }
}

fn parse_value(text: &str) -> Result<Value, ConfigErrors> {
    let parse_error = |line: Option<usize>, message: String| {
        ConfigErrors(vec![ConfigIssue {
            kind: IssueKind::ParseError,
            field: String::new(),
            line,
            message,
        }])
    };
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| parse_error(Some(e.line()), e.to_string()));
    }
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        parse_error(line, e.message().trim().to_string())
    })?;
    Ok(toml_to_json(toml::Value::Table(table)))
}

/// TOML value tree as JSON; non-finite floats become strings so `inf`
/// survives the conversion.
fn toml_to_json(v: toml::Value) -> Value {
    match v {
        toml::Value::String(s) => Value::String(s),
        toml::Value::Integer(i) => Value::from(i),
        toml::Value::Float(f) if f.is_finite() => Value::from(f),
        toml::Value::Float(f) => Value::String(
            if f.is_nan() {
                "nan"
            } else if f > 0.0 {
                "inf"
            } else {
                "-inf"
            }
            .to_string(),
        ),
        toml::Value::Boolean(b) => Value::Bool(b),
        toml::Value::Datetime(d) => Value::String(d.to_string()),
        toml::Value::Array(a) => Value::Array(a.into_iter().map(toml_to_json).collect()),
        toml::Value::Table(t) => {
            Value::Object(t.into_iter().map(|(k, v)| (k, toml_to_json(v))).collect())
        }
    }
}

fn set_path(root: &mut Value, path: &str, value: Value) {
    let mut node = root;
    let mut keys = path.split('.').peekable();
    while let Some(key) = keys.next() {
        if !node.is_object() {
            *node = Value::Object(Map::new());
        }
        let map = node.as_object_mut().expect("object");
        if keys.peek().is_none() {
            map.insert(key.to_string(), value);
            return;
        }
        node = map.entry(key).or_insert_with(|| Value::Object(Map::new()));
    }
}

static EMPTY: std::sync::OnceLock<Map<String, Value>> = std::sync::OnceLock::new();

fn empty_map() -> &'static Map<String, Value> {
    EMPTY.get_or_init(Map::new)
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Reads the raw tree field by field, recording every issue and
/// substituting placeholders so validation can continue.
#[derive(Default)]
struct Validator {
    issues: Vec<ConfigIssue>,
}

impl Validator {
    fn error(&mut self, field: &str, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            kind: IssueKind::ValidationError,
            field: field.to_string(),
            line: None,
            message: message.into(),
        });
    }

    fn table<'a>(
        &mut self,
        parent: &'a Map<String, Value>,
        path: &str,
        key: &str,
    ) -> &'a Map<String, Value> {
        match parent.get(key) {
            None => empty_map(),
            Some(Value::Object(m)) => m,
            Some(other) => {
                self.error(&join(path, key), format!("expected a table, got {other}"));
                empty_map()
            }
        }
    }

    fn allow_keys(&mut self, map: &Map<String, Value>, path: &str, allowed: &[&str]) {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                self.error(
                    &join(path, key),
                    format!("unknown key (expected one of: {})", allowed.join(", ")),
                );
            }
        }
    }

    fn number(&mut self, map: &Map<String, Value>, path: &str, key: &str) -> Option<f64> {
        let field = join(path, key);
        match map.get(key)? {
            Value::Number(n) => n.as_f64(),
            other => {
                self.error(&field, format!("expected a finite number, got {other}"));
                Some(f64::NAN)
            }
        }
    }

    fn required_number(&mut self, map: &Map<String, Value>, path: &str, key: &str) -> f64 {
        self.number(map, path, key).unwrap_or_else(|| {
            self.error(&join(path, key), "missing required key");
            f64::NAN
        })
    }

    fn positive(&mut self, map: &Map<String, Value>, path: &str, key: &str) -> Option<f64> {
        let v = self.number(map, path, key)?;
        if !(v > 0.0 && v.is_finite()) && !v.is_nan() {
            self.error(
                &join(path, key),
                format!("must be positive and finite, got {v}"),
            );
        }
        Some(v)
    }

    /// Non-negative integer in `min..`, or `default` when absent.
    fn integer(
        &mut self,
        map: &Map<String, Value>,
        path: &str,
        key: &str,
        min: u64,
        default: u64,
    ) -> u64 {
        let field = join(path, key);
        match map.get(key) {
            None => default,
            Some(Value::Number(n)) => match n.as_u64() {
                Some(v) if v >= min => v,
                _ => {
                    self.error(&field, format!("must be an integer >= {min}, got {n}"));
                    default
                }
            },
            Some(other) => {
                self.error(&field, format!("expected an integer, got {other}"));
                default
            }
        }
    }

    fn string(&mut self, map: &Map<String, Value>, path: &str, key: &str, default: &str) -> String {
        match map.get(key) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(other) => {
                self.error(&join(path, key), format!("expected a string, got {other}"));
                default.to_string()
            }
        }
    }

    fn boolean(&mut self, map: &Map<String, Value>, path: &str, key: &str, default: bool) -> bool {
        match map.get(key) {
            None => default,
            Some(Value::Bool(b)) => *b,
            Some(other) => {
                self.error(
                    &join(path, key),
                    format!("expected true or false, got {other}"),
                );
                default
            }
        }
    }

    fn coords(
        &mut self,
        map: &Map<String, Value>,
        path: &str,
        key: &str,
        dim: usize,
    ) -> Option<Vec<f64>> {
        let field = join(path, key);
        let Some(v) = map.get(key) else {
            self.error(&field, "missing required key");
            return None;
        };
        let Some(items) = v.as_array() else {
            self.error(
                &field,
                format!("expected an array of {dim} numbers, got {v}"),
            );
            return None;
        };
        let xs: Option<Vec<f64>> = items.iter().map(|x| x.as_f64()).collect();
        match xs {
            Some(xs) if xs.len() == dim && xs.iter().all(|x| x.is_finite()) => Some(xs),
            _ => {
                self.error(
                    &field,
                    format!("expected an array of {dim} finite numbers, got {v}"),
                );
                None
            }
        }
    }

    fn window(&mut self, map: &Map<String, Value>, path: &str, dim: usize) -> Option<WindowSpec> {
        self.allow_keys(map, path, &["lower", "upper"]);
        let lower = self.coords(map, path, "lower", dim);
        let upper = self.coords(map, path, "upper", dim);
        let (lower, upper) = (lower?, upper?);
        let mut ok = true;
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if lo >= hi {
                self.error(
                    path,
                    format!("lower[{i}] = {lo} must be strictly below upper[{i}] = {hi}"),
                );
                ok = false;
            }
        }
        ok.then_some(WindowSpec { lower, upper })
    }

    fn potential(&mut self, parent: &Map<String, Value>, key: &str) -> PotentialSpec {
        let path = format!("potential.{key}");
        let map = self.table(parent, "potential", key);
        self.allow_keys(map, &path, &["kind", "amplitude", "range", "exponent"]);
        let kind_text = self.string(map, &path, "kind", "none");
        let kind = match kind_text.as_str() {
            "none" => PotentialKind::None,
            "step" => PotentialKind::Step,
            "hardcore" | "hard-core" => PotentialKind::Hardcore,
            "soft-core" | "softcore" => PotentialKind::SoftCore,
            other => {
                self.error(
                    &join(&path, "kind"),
                    format!("unknown kind {other:?} (expected none, step, hardcore or soft-core)"),
                );
                return PotentialSpec::none();
            }
        };
        let wanted: &[&str] = match kind {
            PotentialKind::None => &[],
            PotentialKind::Step => &["amplitude", "range"],
            PotentialKind::Hardcore => &["range"],
            PotentialKind::SoftCore => &["amplitude", "range", "exponent"],
        };
        for key in ["amplitude", "range", "exponent"] {
            let present = map.contains_key(key);
            if present && !wanted.contains(&key) {
                self.error(&join(&path, key), format!("not used by kind {kind_text:?}"));
            } else if !present && wanted.contains(&key) {
                self.error(&join(&path, key), format!("required by kind {kind_text:?}"));
            }
        }
        let amplitude = match map.get("amplitude") {
            Some(Value::String(t)) if is_inf_text(t) => {
                if kind == PotentialKind::SoftCore {
                    self.error(
                        &join(&path, "amplitude"),
                        "amplitude \"inf\" is not allowed for kind \"soft-core\"",
                    );
                }
                Some(Amplitude(f64::INFINITY))
            }
            Some(_) => self.number(map, &path, "amplitude").map(Amplitude),
            None => None,
        };
        let spec = PotentialSpec {
            kind,
            amplitude: amplitude.filter(|_| wanted.contains(&"amplitude")),
            range: self
                .positive(map, &path, "range")
                .filter(|_| wanted.contains(&"range")),
            exponent: self
                .positive(map, &path, "exponent")
                .filter(|_| wanted.contains(&"exponent")),
        };
        let complete = wanted.iter().all(|k| map.contains_key(*k));
        let before = self.issues.len();
        if complete && !self.issues.iter().any(|i| i.field.starts_with(&path)) {
            if let Err(e) = spec.to_potential() {
                self.error(&path, e.to_string());
            }
        }
        if self.issues.len() > before {
            return PotentialSpec::none();
        }
        spec
    }

    fn build(&mut self, root: &Value) -> ExperimentConfig {
        let root = match root {
            Value::Object(m) => m,
            other => {
                self.error("", format!("expected a table at top level, got {other}"));
                empty_map()
            }
        };
        self.allow_keys(
            root,
            "",
            &[
                "dimension",
                "seed",
                "window",
                "intensity",
                "potential",
                "sampler",
                "oracle",
                "verify",
            ],
        );
        let dimension = match root.get("dimension") {
            None => {
                self.error("dimension", "missing required key");
                0
            }
            Some(_) => self.integer(root, "", "dimension", 1, 0) as usize,
        };
        let seed = self.integer(root, "", "seed", 0, 0);

        let window_map = self.table(root, "", "window");
        if !root.contains_key("window") {
            self.error("window", "missing required table");
        }
        let window = if dimension > 0 && root.contains_key("window") {
            self.window(window_map, "window", dimension)
        } else {
            None
        };
        let w = window.as_ref().and_then(|s| s.to_window().ok());

        let im = self.table(root, "", "intensity");
        self.allow_keys(im, "intensity", &["z", "density", "quadrature_resolution"]);
        let z = self.required_number(im, "intensity", "z");
        if !(z > 0.0 && z.is_finite()) && !z.is_nan() {
            self.error(
                "intensity.z",
                format!("must be positive and finite, got {z}"),
            );
        }
        let density_text = self.string(im, "intensity", "density", "constant");
        let density = match density_text.as_str() {
            "constant" => DensityKind::Constant,
            "linear-x1" => DensityKind::LinearX1,
            other => {
                self.error(
                    "intensity.density",
                    format!("unknown density {other:?} (expected constant or linear-x1)"),
                );
                DensityKind::Constant
            }
        };
        if let (DensityKind::LinearX1, Some(w)) = (density, &w) {
            if w.upper()[0] <= 0.0 {
                self.error(
                    "intensity.density",
                    "linear-x1 vanishes on the whole window",
                );
            }
        }
        let quadrature_resolution = self.integer(
            im,
            "intensity",
            "quadrature_resolution",
            1,
            DEFAULT_QUADRATURE as u64,
        ) as usize;
        let intensity = IntensitySpec {
            z,
            density,
            quadrature_resolution,
        };

        let pm = self.table(root, "", "potential");
        self.allow_keys(pm, "potential", &["cross", "self_plus", "self_minus"]);
        let potential = PotentialSpecs {
            cross: self.potential(pm, "cross"),
            self_plus: self.potential(pm, "self_plus"),
            self_minus: self.potential(pm, "self_minus"),
        };

        let sm = self.table(root, "", "sampler");
        self.allow_keys(sm, "sampler", &["steps", "burnin", "thin", "chains"]);
        let steps = self.integer(sm, "sampler", "steps", 1, DEFAULT_STEPS);
        let thin = self.integer(sm, "sampler", "thin", 1, DEFAULT_THIN);
        let chains = self.integer(sm, "sampler", "chains", 1, 1);
        let mass = match (&w, z > 0.0 && z.is_finite()) {
            (Some(w), true) => intensity_measure(z, density, quadrature_resolution).mass(w),
            _ => 1.0,
        };
        // capped so short runs still yield samples
        let burnin_default = default_burnin(mass).min(steps / 2);
        let burnin = self.integer(sm, "sampler", "burnin", 0, burnin_default);
        if burnin >= steps {
            self.error(
                "sampler.burnin",
                format!("must be below sampler.steps = {steps}, got {burnin}"),
            );
        } else if (steps - burnin) / thin == 0 {
            self.error(
                "sampler.thin",
                format!("{thin} leaves no samples after {burnin} burn-in steps of {steps}"),
            );
        }
        let sampler = SamplerSpec {
            steps,
            burnin,
            thin,
            chains,
        };

        let om = self.table(root, "", "oracle");
        self.allow_keys(om, "oracle", &["n_max", "mc_per_term", "samples"]);
        let oracle = OracleSpec {
            n_max: self.integer(om, "oracle", "n_max", 0, 6) as usize,
            mc_per_term: self.integer(om, "oracle", "mc_per_term", 2, 100_000) as usize,
            samples: self.integer(om, "oracle", "samples", 1, 1000) as usize,
        };
        if oracle.n_max > 40 {
            self.error(
                "oracle.n_max",
                format!("must be at most 40, got {}", oracle.n_max),
            );
        }

        let vm = self.table(root, "", "verify");
        self.allow_keys(
            vm,
            "verify",
            &[
                "point_function",
                "pair_function",
                "configuration_function",
                "sigma_points",
                "inner_draws",
                "sub_plus",
                "sub_minus",
                "retry",
                "instances",
                "max_points",
                "max_eta",
                "eta_catalogue",
            ],
        );
        let function = |v: &mut Self, key: &str, default: &str, arity: Arity| {
            let text = v.string(vm, "verify", key, default);
            if let Some(w) = &w {
                let checked = TestFunction::parse(&text, w).and_then(|f| f.expect_arity(arity));
                if let Err(e) = checked {
                    v.error(&join("verify", key), e.to_string());
                }
            }
            text
        };
        let point_function = function(
            self,
            "point_function",
            "cross-neighbours:0.1",
            Arity::PointMarked,
        );
        let pair_function = function(self, "pair_function", "pair-within:0.1", Arity::PairMarked);
        let configuration_function =
            function(self, "configuration_function", "one", Arity::Configuration);
        let subwindow = |v: &mut Self, key: &str| -> WindowSpec {
            let fallback = window.clone().unwrap_or(WindowSpec {
                lower: vec![],
                upper: vec![],
            });
            if !vm.contains_key(key) {
                return fallback;
            }
            let path = join("verify", key);
            let map = v.table(vm, "verify", key);
            let Some(spec) = (dimension > 0)
                .then(|| v.window(map, &path, dimension))
                .flatten()
            else {
                return fallback;
            };
            if let (Some(w), Ok(sub)) = (&w, spec.to_window()) {
                if !w.contains_window(&sub) {
                    v.error(&path, "subwindow is not contained in the window");
                }
            }
            spec
        };
        let sub_plus = subwindow(self, "sub_plus");
        let sub_minus = subwindow(self, "sub_minus");
        let verify = VerifySpec {
            point_function,
            pair_function,
            configuration_function,
            sigma_points: self.integer(vm, "verify", "sigma_points", 1, 4) as usize,
            inner_draws: self.integer(vm, "verify", "inner_draws", 1, 8) as usize,
            sub_plus,
            sub_minus,
            retry: self.boolean(vm, "verify", "retry", true),
            instances: self.integer(vm, "verify", "instances", 1, 500) as usize,
            max_points: self.integer(vm, "verify", "max_points", 0, 8) as usize,
            max_eta: self.integer(vm, "verify", "max_eta", 0, 4) as usize,
            eta_catalogue: self.integer(vm, "verify", "eta_catalogue", 1, 10) as usize,
        };

        ExperimentConfig {
            dimension,
            seed,
            window: window.unwrap_or(WindowSpec {
                lower: vec![],
                upper: vec![],
            }),
            intensity,
            potential,
            sampler,
            oracle,
            verify,
        }
    }
}

fn intensity_measure(z: f64, density: DensityKind, resolution: usize) -> IntensityMeasure {
    let d = match density {
        DensityKind::Constant => Density::Constant,
        DensityKind::LinearX1 => Density::LinearX1,
    };
    IntensityMeasure::with_density(z, d)
        .expect("positive finite z")
        .with_quadrature_resolution(resolution)
}

//! Experiment configuration files.
//!
//! A config is a TOML document with three top-level scalars and two tables:
//!
//! ```toml
//! model = "driven_qubit"      # or "avoided_crossing"
//! output = "fig1.csv"         # optional, stdout when absent
//! steps = 2000                # optional, propagator steps (driven_qubit only)
//!
//! [params]                    # optional, missing keys take the reference values
//! omega = 1.0
//! alpha = 1.0
//! big_omega = 0.3
//! g = 0.3
//! s = 0.7
//!
//! [sweep]
//! variable = "tau"            # "tau" for driven_qubit, "theta" for avoided_crossing
//! start = 0.0
//! stop = 30.0
//! count = 301
//! ```
//!
//! Validation collects every problem before returning, each tagged with the
//! dotted path of the offending field.

use std::fmt;
use std::path::PathBuf;

use mspredict_core::dynamics::DEFAULT_STEPS;
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    DrivenQubit,
    AvoidedCrossing,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::DrivenQubit => "driven_qubit",
            ModelKind::AvoidedCrossing => "avoided_crossing",
        }
    }

    /// The parameter a sweep runs over.
    pub fn sweep_variable(self) -> &'static str {
        match self {
            ModelKind::DrivenQubit => "tau",
            ModelKind::AvoidedCrossing => "theta",
        }
    }

    fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::DrivenQubit => &["omega", "alpha", "big_omega", "g", "s"],
            ModelKind::AvoidedCrossing => &["omega", "s"],
        }
    }
}

/// Fixed model parameters; the swept variable is supplied per point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    DrivenQubit {
        omega: f64,
        alpha: f64,
        big_omega: f64,
        g: f64,
        s: f64,
    },
    AvoidedCrossing {
        omega: f64,
        s: f64,
    },
}

impl ModelParams {
    /// Reference values: `omega = alpha = 1`, `g = big_omega = 0.3`, `s = 0.7`
    /// for the driven qubit and `omega = 1`, `s = 0.9` for the avoided crossing.
    pub fn reference(kind: ModelKind) -> Self {
        match kind {
            ModelKind::DrivenQubit => ModelParams::DrivenQubit {
                omega: 1.0,
                alpha: 1.0,
                big_omega: 0.3,
                g: 0.3,
                s: 0.7,
            },
            ModelKind::AvoidedCrossing => ModelParams::AvoidedCrossing { omega: 1.0, s: 0.9 },
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::DrivenQubit { .. } => ModelKind::DrivenQubit,
            ModelParams::AvoidedCrossing { .. } => ModelKind::AvoidedCrossing,
        }
    }

    /// Mutable slot for a named parameter, if the model has one.
    pub fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        match self {
            ModelParams::DrivenQubit {
                omega,
                alpha,
                big_omega,
                g,
                s,
            } => match name {
                "omega" => Some(omega),
                "alpha" => Some(alpha),
                "big_omega" => Some(big_omega),
                "g" => Some(g),
                "s" => Some(s),
                _ => None,
            },
            ModelParams::AvoidedCrossing { omega, s } => match name {
                "omega" => Some(omega),
                "s" => Some(s),
                _ => None,
            },
        }
    }

    fn s(&self) -> f64 {
        match *self {
            ModelParams::DrivenQubit { s, .. } | ModelParams::AvoidedCrossing { s, .. } => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    /// `count` evenly spaced points from `start` to `stop` inclusive.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub sweep: SweepSpec,
    pub output_path: Option<PathBuf>,
    pub steps: usize,
}

impl ExperimentConfig {
    pub fn model(&self) -> ModelKind {
        self.params.kind()
    }

    /// Field-level checks shared by config files and command-line overrides.
    pub fn check(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        let kind = self.model();
        let mut params = self.params;
        for name in kind.param_names() {
            let value = *params.field_mut(name).expect("listed parameter");
            if !value.is_finite() {
                issues.push(ConfigIssue::new(
                    format!("params.{name}"),
                    "must be a finite number",
                ));
            }
        }
        let s = self.params.s();
        if s.is_finite() && !(0.0..=1.0).contains(&s) {
            issues.push(ConfigIssue::new(
                "params.s",
                format!("must lie in [0, 1], got {s}"),
            ));
        }
        if self.sweep.variable != kind.sweep_variable() {
            issues.push(ConfigIssue::new(
                "sweep.variable",
                format!(
                    "model {} sweeps \"{}\", got \"{}\"",
                    kind.name(),
                    kind.sweep_variable(),
                    self.sweep.variable
                ),
            ));
        }
        let (start, stop) = (self.sweep.start, self.sweep.stop);
        if !start.is_finite() || !stop.is_finite() {
            issues.push(ConfigIssue::new("sweep", "start and stop must be finite"));
        } else {
            if start >= stop {
                issues.push(ConfigIssue::new(
                    "sweep.stop",
                    format!("must exceed start ({start}), got {stop}"),
                ));
            }
            if kind == ModelKind::DrivenQubit && start < 0.0 {
                issues.push(ConfigIssue::new(
                    "sweep.start",
                    format!("tau must be >= 0, got {start}"),
                ));
            }
        }
        if self.sweep.count < 2 {
            issues.push(ConfigIssue::new(
                "sweep.count",
                format!("must be at least 2, got {}", self.sweep.count),
            ));
        }
        if self.steps == 0 {
            issues.push(ConfigIssue::new("steps", "must be at least 1"));
        }
        issues
    }
}

/// One validation problem, tied to a field path such as `params.s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigIssue {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn count(v: &Value) -> Option<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => usize::try_from(*i).ok(),
        _ => None,
    }
}

fn reject_unknown(table: &Table, prefix: &str, known: &[&str], issues: &mut Vec<ConfigIssue>) {
    for key in table.keys() {
        if !known.contains(&key.as_str()) {
            issues.push(ConfigIssue::new(format!("{prefix}{key}"), "unknown field"));
        }
    }
}

/// Parses and validates a config document, reporting every problem found.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, Vec<ConfigIssue>> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| {
        vec![ConfigIssue::new("<document>", e.message().to_string())]
    })?;
    let mut issues = Vec::new();
    reject_unknown(
        &doc,
        "",
        &["model", "output", "steps", "params", "sweep"],
        &mut issues,
    );

    let kind = match doc.get("model") {
        None => {
            issues.push(ConfigIssue::new("model", "missing"));
            None
        }
        Some(Value::String(name)) => match name.as_str() {
            "driven_qubit" => Some(ModelKind::DrivenQubit),
            "avoided_crossing" => Some(ModelKind::AvoidedCrossing),
            other => {
                issues.push(ConfigIssue::new(
                    "model",
                    format!("unknown model \"{other}\", expected driven_qubit or avoided_crossing"),
                ));
                None
            }
        },
        Some(_) => {
            issues.push(ConfigIssue::new("model", "must be a string"));
            None
        }
    };

    let output_path = match doc.get("output") {
        None => None,
        Some(Value::String(p)) => Some(PathBuf::from(p)),
        Some(_) => {
            issues.push(ConfigIssue::new("output", "must be a string path"));
            None
        }
    };

    let steps = match doc.get("steps") {
        None => DEFAULT_STEPS,
        Some(v) => count(v).unwrap_or_else(|| {
            issues.push(ConfigIssue::new("steps", "must be a non-negative integer"));
            DEFAULT_STEPS
        }),
    };

    let mut params = kind.map(ModelParams::reference);
    match doc.get("params") {
        None => {}
        Some(Value::Table(table)) => {
            if let Some(p) = params.as_mut() {
                reject_unknown(table, "params.", p.kind().param_names(), &mut issues);
                for (key, value) in table {
                    if let Some(slot) = p.field_mut(key) {
                        match number(value) {
                            Some(x) => *slot = x,
                            None => issues.push(ConfigIssue::new(
                                format!("params.{key}"),
                                "must be a number",
                            )),
                        }
                    }
                }
            }
        }
        Some(_) => issues.push(ConfigIssue::new("params", "must be a table")),
    }

    let sweep = match doc.get("sweep") {
        None => {
            issues.push(ConfigIssue::new("sweep", "missing [sweep] block"));
            None
        }
        Some(Value::Table(table)) => {
            reject_unknown(
                table,
                "sweep.",
                &["variable", "start", "stop", "count"],
                &mut issues,
            );
            let variable = match table.get("variable") {
                Some(Value::String(v)) => Some(v.clone()),
                Some(_) => {
                    issues.push(ConfigIssue::new("sweep.variable", "must be a string"));
                    None
                }
                None => {
                    issues.push(ConfigIssue::new("sweep.variable", "missing"));
                    None
                }
            };
            let mut real = |key: &str| match table.get(key) {
                Some(v) => number(v).or_else(|| {
                    issues.push(ConfigIssue::new(format!("sweep.{key}"), "must be a number"));
                    None
                }),
                None => {
                    issues.push(ConfigIssue::new(format!("sweep.{key}"), "missing"));
                    None
                }
            };
            let start = real("start");
            let stop = real("stop");
            let n = match table.get("count") {
                Some(v) => count(v).or_else(|| {
                    issues.push(ConfigIssue::new(
                        "sweep.count",
                        "must be a non-negative integer",
                    ));
                    None
                }),
                None => {
                    issues.push(ConfigIssue::new("sweep.count", "missing"));
                    None
                }
            };
            // stand-ins for unusable fields keep the remaining checks running
            let (start, stop) = match (start, stop) {
                (Some(a), Some(b)) => (a, b),
                (Some(a), None) => (a, a + 1.0),
                (None, Some(b)) => (b - 1.0, b),
                (None, None) => (0.0, 1.0),
            };
            Some(SweepSpec {
                variable: variable
                    .or_else(|| kind.map(|k| k.sweep_variable().to_string()))
                    .unwrap_or_default(),
                start,
                stop,
                count: n.unwrap_or(2),
            })
        }
        Some(_) => {
            issues.push(ConfigIssue::new("sweep", "must be a table"));
            None
        }
    };

    if let (Some(params), Some(sweep)) = (params, sweep) {
        let cfg = ExperimentConfig {
            params,
            sweep,
            output_path,
            steps,
        };
        let reported: Vec<String> = issues.iter().map(|i| i.field.clone()).collect();
        issues.extend(cfg.check().into_iter().filter(|i| {
            !reported.iter().any(|r| {
                i.field == *r
                    || i.field.starts_with(&format!("{r}."))
                    || r.starts_with(&format!("{}.", i.field))
            })
        }));
        if issues.is_empty() {
            return Ok(cfg);
        }
    }
    Err(issues)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"
model = "driven_qubit"
[params]
omega = 1.0
alpha = 1
big_omega = 0.3
g = 0.3
s = 0.7
[sweep]
variable = "tau"
start = 0
stop = 30
count = 301
"#;

    #[test]
    fn parses_reference_config() {
        let cfg = validate_config(FIG1).unwrap();
        assert_eq!(cfg.params, ModelParams::reference(ModelKind::DrivenQubit));
        assert_eq!(cfg.steps, DEFAULT_STEPS);
        assert_eq!(cfg.output_path, None);
        let pts = cfg.sweep.points();
        assert_eq!(pts.len(), 301);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[300], 30.0);
        assert!((pts[10] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_population_names_field() {
        let err = validate_config(&FIG1.replace("s = 0.7", "s = 1.3")).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].field, "params.s");
        assert!(err[0].message.contains("[0, 1]"));
    }

    #[test]
    fn missing_sweep_is_reported() {
        let err = validate_config("model = \"avoided_crossing\"\n").unwrap_err();
        assert!(err.iter().any(|e| e.field == "sweep"));
    }

    #[test]
    fn all_errors_at_once() {
        let text = r#"
model = "avoided_crossing"
steps = -3
colour = "red"
[params]
s = "high"
[sweep]
variable = "tau"
start = 1.0
stop = "x"
count = 1
"#;
        let fields: Vec<String> = validate_config(text)
            .unwrap_err()
            .into_iter()
            .map(|e| e.field)
            .collect();
        for f in ["steps", "colour", "params.s", "sweep.stop", "sweep.count"] {
            assert!(
                fields.contains(&f.to_string()),
                "{f} missing from {fields:?}"
            );
        }
    }

    #[test]
    fn semantic_checks() {
        let text = r#"
model = "avoided_crossing"
[params]
omega = 2.0
[sweep]
variable = "tau"
start = 3.0
stop = 1.0
count = 1
"#;
        let fields: Vec<String> = validate_config(text)
            .unwrap_err()
            .into_iter()
            .map(|e| e.field)
            .collect();
        assert_eq!(fields, ["sweep.variable", "sweep.stop", "sweep.count"]);
    }

    #[test]
    fn unknown_model_and_syntax_errors() {
        let err = validate_config(
            "model = \"ising\"\n[sweep]\nvariable=\"tau\"\nstart=0\nstop=1\ncount=2",
        )
        .unwrap_err();
        assert_eq!(err[0].field, "model");
        let err = validate_config("model = ").unwrap_err();
        assert_eq!(err[0].field, "<document>");
    }
}

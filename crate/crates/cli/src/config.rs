//! Run configuration: a TOML document merged with command-line overrides
//! and validated before anything is dispatched.

use std::path::PathBuf;
use std::str::FromStr;

use mixlap_core::QuadratureSpec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "MIXLAP_OUTPUT_DIR";
/// Output directory used when neither the config, a flag nor the
/// environment names one.
pub const DEFAULT_OUTPUT_DIR: &str = "mixlap-out";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("could not read config: {0}")]
    Parse(String),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("{message}")]
    Invalid { key: &'static str, message: String },
}

impl ConfigError {
    /// The offending key, when there is one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Parse(_) => None,
            ConfigError::Missing(k) => Some(k),
            ConfigError::Invalid { key, .. } => Some(key),
        }
    }
}

fn invalid<T>(key: &'static str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid {
        key,
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Barrier,
    Verify,
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    /// Rescaled parabola for `s < 1/2`.
    Ces,
    /// Cut-off parabola valid for every `s`.
    General,
    /// Data positive on the boundary sphere only.
    BoundaryOnly,
}

/// A named load `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadSpec {
    Constant(f64),
    /// Coefficients `c_0, c_1, ...` of `Σ c_k x^k`.
    Polynomial(Vec<f64>),
    /// Two-column CSV `x,f` interpolated linearly.
    Sampled(PathBuf),
}

impl FromStr for LoadSpec {
    type Err = String;

    /// Parses `constant:1`, `polynomial:0,0,1` or `sampled:path.csv`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = text
            .split_once(':')
            .ok_or("expected constant:<v>, polynomial:<c0,c1,...> or sampled:<path>")?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number `{t}`: {e}"))
        };
        match kind {
            "constant" => Ok(LoadSpec::Constant(num(rest)?)),
            "polynomial" => Ok(LoadSpec::Polynomial(
                rest.split(',').map(num).collect::<Result<_, _>>()?,
            )),
            "sampled" => Ok(LoadSpec::Sampled(rest.into())),
            other => Err(format!("unknown load kind `{other}`")),
        }
    }
}

/// Partial quadrature settings; missing fields keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub inner_radius: Option<f64>,
    pub outer_radius: Option<f64>,
    pub panels: Option<usize>,
    pub tolerance: Option<f64>,
}

/// The document as written, every key optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: Option<Command>,
    pub s: Option<f64>,
    pub domain: Option<[f64; 2]>,
    pub n: Option<i64>,
    pub f: Option<LoadSpec>,
    pub quad: Option<QuadConfig>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub example: Option<Example>,
    pub dim: Option<i64>,
    pub radius: Option<f64>,
    pub random_loads: Option<usize>,
    pub orders: Option<Vec<f64>>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Keys set in `other` replace those set here.
    pub fn merged(self, other: RawConfig) -> RawConfig {
        RawConfig {
            command: other.command.or(self.command),
            s: other.s.or(self.s),
            domain: other.domain.or(self.domain),
            n: other.n.or(self.n),
            f: other.f.or(self.f),
            quad: match (self.quad, other.quad) {
                (Some(a), Some(b)) => Some(QuadConfig {
                    inner_radius: b.inner_radius.or(a.inner_radius),
                    outer_radius: b.outer_radius.or(a.outer_radius),
                    panels: b.panels.or(a.panels),
                    tolerance: b.tolerance.or(a.tolerance),
                }),
                (a, b) => b.or(a),
            },
            output_dir: other.output_dir.or(self.output_dir),
            seed: other.seed.or(self.seed),
            example: other.example.or(self.example),
            dim: other.dim.or(self.dim),
            radius: other.radius.or(self.radius),
            random_loads: other.random_loads.or(self.random_loads),
            orders: other.orders.or(self.orders),
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Order of the fractional part; absent only for `verify`, which sweeps
    /// `orders` instead.
    pub s: Option<f64>,
    /// Solve interval, or the sampling window of `barrier`.
    pub domain: (f64, f64),
    /// Interior nodes (`solve`, `verify`, boundary-only example) or sample
    /// count (`barrier`).
    pub n: usize,
    pub f: Option<LoadSpec>,
    pub quad: QuadratureSpec,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub example: Example,
    pub dim: usize,
    pub radius: f64,
    pub random_loads: usize,
    pub orders: Vec<f64>,
}

/// Parses and validates a TOML document on its own.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    validate(
        RawConfig::from_toml(text)?,
        std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from),
    )
}

fn order(key: &'static str, s: f64) -> Result<f64, ConfigError> {
    if s > 0.0 && s < 1.0 {
        Ok(s)
    } else {
        invalid(key, format!("{key} must lie in (0,1), got {s}"))
    }
}

/// Checks every key against the preconditions of the command it feeds.
/// `env_output_dir` is used when the document names no output directory.
pub fn validate(raw: RawConfig, env_output_dir: Option<PathBuf>) -> Result<RunConfig, ConfigError> {
    let command = raw.command.ok_or(ConfigError::Missing("command"))?;
    let s = raw.s.map(|s| order("s", s)).transpose()?;
    if s.is_none() && command != Command::Verify {
        return Err(ConfigError::Missing("s"));
    }

    let domain = match (raw.domain, command) {
        (Some([a, b]), _) => (a, b),
        (None, Command::Barrier) => (0.0, 1.0),
        (None, _) => (-1.0, 1.0),
    };
    if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
        return invalid("domain", "domain must be [a, b] with finite a < b");
    }

    let n = match (raw.n, command) {
        (Some(n), _) => n,
        (None, Command::Solve) => return Err(ConfigError::Missing("n")),
        (None, Command::Barrier) => 200,
        (None, Command::Verify) => 255,
        (None, Command::Counterexample) => 511,
    };
    if n < 1 {
        return invalid("n", format!("n must be a positive integer, got {n}"));
    }
    let n = n as usize;

    if command == Command::Solve && raw.f.is_none() {
        return Err(ConfigError::Missing("f"));
    }
    match &raw.f {
        Some(LoadSpec::Constant(v)) if !v.is_finite() => {
            return invalid("f", "f constant must be finite");
        }
        Some(LoadSpec::Polynomial(c)) if c.is_empty() || c.iter().any(|v| !v.is_finite()) => {
            return invalid("f", "f polynomial needs at least one finite coefficient");
        }
        _ => {}
    }

    let q = raw.quad.unwrap_or_default();
    let base = QuadratureSpec::default();
    let quad = QuadratureSpec {
        inner_radius: q.inner_radius.unwrap_or(base.inner_radius),
        outer_radius: q.outer_radius.unwrap_or(base.outer_radius),
        panels: q.panels.unwrap_or(base.panels),
        tolerance: q.tolerance.unwrap_or(base.tolerance),
    };
    if let Err(e) = quad.validate() {
        return invalid("quad", format!("quad: {e}"));
    }

    let example = raw.example.unwrap_or(Example::Ces);
    let dim = raw.dim.unwrap_or(1);
    if !(1..=3).contains(&dim) {
        return invalid("dim", format!("dim must be 1, 2 or 3, got {dim}"));
    }
    let radius = raw.radius.unwrap_or(2.0);
    if !(radius > 1.0 && radius.is_finite()) {
        return invalid(
            "radius",
            format!("radius must be a finite number above 1, got {radius}"),
        );
    }
    if command == Command::Counterexample && example == Example::Ces {
        if let Some(s) = s.filter(|s| *s >= 0.5) {
            return invalid(
                "s",
                format!("s must lie in (0,1/2) for the ces example, got {s}"),
            );
        }
    }
    if command == Command::Counterexample && example != Example::BoundaryOnly && raw.n.is_some() {
        return invalid("n", "n only applies to the boundary_only example");
    }

    let orders = raw.orders.unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
    if orders.is_empty() {
        return invalid("orders", "orders must not be empty");
    }
    for &o in &orders {
        order("orders", o)?;
    }
    let random_loads = raw.random_loads.unwrap_or(20);
    if random_loads == 0 {
        return invalid("random_loads", "random_loads must be positive");
    }

    let output_dir = raw
        .output_dir
        .or(env_output_dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));

    Ok(RunConfig {
        command,
        s,
        domain,
        n,
        f: raw.f,
        quad,
        output_dir,
        seed: raw.seed.unwrap_or(42),
        example,
        dim: dim as usize,
        radius,
        random_loads,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        command = "solve"
        s = 0.5
        domain = [-1.0, 1.0]
        n = 127
        f = { constant = 1.0 }
    "#;

    #[test]
    fn minimal_document_is_valid() {
        let c = validate(RawConfig::from_toml(MINIMAL).unwrap(), None).unwrap();
        assert_eq!(c.command, Command::Solve);
        assert_eq!(c.n, 127);
        assert_eq!(c.f, Some(LoadSpec::Constant(1.0)));
        assert_eq!(c.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
        assert_eq!(c.quad, QuadratureSpec::default());
    }

    #[test]
    fn errors_name_the_key() {
        let bad = MINIMAL.replace("s = 0.5", "s = 1.2");
        let e = validate(RawConfig::from_toml(&bad).unwrap(), None).unwrap_err();
        assert_eq!(e.to_string(), "s must lie in (0,1), got 1.2");
        assert_eq!(e.key(), Some("s"));

        let bad = MINIMAL.replace("n = 127", "n = 0");
        let e = validate(RawConfig::from_toml(&bad).unwrap(), None).unwrap_err();
        assert_eq!(e.key(), Some("n"));

        let bad = MINIMAL.replace("n = 127", "");
        let e = validate(RawConfig::from_toml(&bad).unwrap(), None).unwrap_err();
        assert_eq!(e, ConfigError::Missing("n"));

        let e = RawConfig::from_toml(&format!("{MINIMAL}\nbogus = 1")).unwrap_err();
        assert!(e.to_string().contains("bogus"));

        let e = RawConfig::from_toml(&MINIMAL.replace("n = 127", "n = \"many\"")).unwrap_err();
        assert!(e.to_string().contains("n"));
    }

    #[test]
    fn overrides_and_environment() {
        let base = RawConfig::from_toml(MINIMAL).unwrap();
        let flags = RawConfig {
            n: Some(63),
            quad: Some(QuadConfig {
                tolerance: Some(1e-9),
                ..QuadConfig::default()
            }),
            ..RawConfig::default()
        };
        let c = validate(base.clone().merged(flags), Some("env-dir".into())).unwrap();
        assert_eq!(c.n, 63);
        assert_eq!(c.quad.tolerance, 1e-9);
        assert_eq!(c.output_dir, PathBuf::from("env-dir"));

        let flags = RawConfig {
            output_dir: Some("flag-dir".into()),
            ..RawConfig::default()
        };
        let c = validate(base.merged(flags), Some("env-dir".into())).unwrap();
        assert_eq!(c.output_dir, PathBuf::from("flag-dir"));
    }

    #[test]
    fn load_specs_parse_from_flags() {
        assert_eq!("constant:2".parse(), Ok(LoadSpec::Constant(2.0)));
        assert_eq!(
            "polynomial:0, 0,1".parse(),
            Ok(LoadSpec::Polynomial(vec![0.0, 0.0, 1.0]))
        );
        assert_eq!(
            "sampled:f.csv".parse(),
            Ok(LoadSpec::Sampled("f.csv".into()))
        );
        assert!("cubic:1".parse::<LoadSpec>().is_err());
    }

    #[test]
    fn command_specific_rules() {
        let raw = RawConfig {
            command: Some(Command::Verify),
            ..RawConfig::default()
        };
        let c = validate(raw, None).unwrap();
        assert_eq!((c.s, c.n, c.seed), (None, 255, 42));

        let raw = RawConfig {
            command: Some(Command::Counterexample),
            s: Some(0.6),
            ..RawConfig::default()
        };
        assert_eq!(validate(raw, None).unwrap_err().key(), Some("s"));

        let raw = RawConfig {
            command: Some(Command::Barrier),
            ..RawConfig::default()
        };
        assert_eq!(validate(raw, None).unwrap_err(), ConfigError::Missing("s"));
    }
}

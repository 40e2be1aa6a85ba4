//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, keys are case-sensitive.
//! Unknown and duplicate keys are rejected with the offending line number.
//! Decoherence can be given either through the `(xi, zeta)` shorthand or as
//! explicit per-channel rates; mixing the two styles is an error.

use crate::dynamics::IntegratorConfig;
use crate::model::{DecoherenceRates, ModelParams};
use crate::sweep::default_time_window;

/// A configuration problem, with the 1-based line it came from when known.
#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "config error at line {line}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

const SHORTHAND_KEYS: [&str; 2] = ["xi", "zeta"];
const EXPLICIT_RATE_KEYS: [&str; 6] = [
    "kappa_a",
    "kappa_b",
    "gamma_1",
    "gamma_phi_1",
    "gamma_2",
    "gamma_phi_2",
];

/// Raw key/value assignments from one config file.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub j: Option<f64>,
    pub theta: Option<f64>,
    pub xi: Option<f64>,
    pub zeta: Option<f64>,
    pub kappa_a: Option<f64>,
    pub kappa_b: Option<f64>,
    pub gamma_1: Option<f64>,
    pub gamma_phi_1: Option<f64>,
    pub gamma_2: Option<f64>,
    pub gamma_phi_2: Option<f64>,
    pub fock_dim: Option<usize>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub record_every: Option<usize>,
    pub output_path: Option<String>,
}

/// Fully resolved run settings: validated parameters plus integrator
/// choices (t_max stays `None` when the automatic window should be used).
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub params: ModelParams,
    pub dt: f64,
    pub t_max: Option<f64>,
    pub record_every: Option<usize>,
    pub output_path: Option<String>,
}

impl ResolvedRun {
    /// Integrator settings for these parameters; an absent t_max falls back
    /// to the regime-aware default window.
    pub fn integrator(&self) -> Result<IntegratorConfig, ConfigError> {
        let t_max = self.t_max.unwrap_or_else(|| default_time_window(&self.params));
        let mut cfg = IntegratorConfig::new(self.dt, t_max)
            .map_err(|e| ConfigError::global(e.to_string()))?;
        if let Some(stride) = self.record_every {
            cfg = cfg
                .with_record_every(stride)
                .map_err(|e| ConfigError::global(e.to_string()))?;
        }
        Ok(cfg)
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<&str> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::at(
                lineno,
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::at(lineno, format!("key `{key}` has no value")));
        }

        let float = |slot: &mut Option<f64>| -> Result<(), ConfigError> {
            *slot = Some(value.parse::<f64>().map_err(|_| {
                ConfigError::at(lineno, format!("key `{key}`: `{value}` is not a number"))
            })?);
            Ok(())
        };
        let uint = |slot: &mut Option<usize>| -> Result<(), ConfigError> {
            *slot = Some(value.parse::<usize>().map_err(|_| {
                ConfigError::at(
                    lineno,
                    format!("key `{key}`: `{value}` is not a positive integer"),
                )
            })?);
            Ok(())
        };

        match key {
            "g1" => float(&mut cfg.g1)?,
            "g2" => float(&mut cfg.g2)?,
            "j" => float(&mut cfg.j)?,
            "theta" => float(&mut cfg.theta)?,
            "xi" => float(&mut cfg.xi)?,
            "zeta" => float(&mut cfg.zeta)?,
            "kappa_a" => float(&mut cfg.kappa_a)?,
            "kappa_b" => float(&mut cfg.kappa_b)?,
            "gamma_1" => float(&mut cfg.gamma_1)?,
            "gamma_phi_1" => float(&mut cfg.gamma_phi_1)?,
            "gamma_2" => float(&mut cfg.gamma_2)?,
            "gamma_phi_2" => float(&mut cfg.gamma_phi_2)?,
            "fock_dim" => uint(&mut cfg.fock_dim)?,
            "dt" => float(&mut cfg.dt)?,
            "t_max" => float(&mut cfg.t_max)?,
            "record_every" => uint(&mut cfg.record_every)?,
            "output_path" => cfg.output_path = Some(value.to_string()),
            other => {
                return Err(ConfigError::at(lineno, format!("unknown key `{other}`")));
            }
        }

        let canonical = canonical_key(key);
        if seen.contains(&canonical) {
            return Err(ConfigError::at(lineno, format!("duplicate key `{key}`")));
        }
        seen.push(canonical);
    }

    let has_shorthand = SHORTHAND_KEYS.iter().any(|k| seen.contains(k));
    let has_explicit = EXPLICIT_RATE_KEYS.iter().any(|k| seen.contains(k));
    if has_shorthand && has_explicit {
        return Err(ConfigError::global(
            "the (xi, zeta) shorthand and explicit per-channel rates are mutually exclusive"
                .to_string(),
        ));
    }
    Ok(cfg)
}

fn canonical_key(key: &str) -> &'static str {
    for k in SHORTHAND_KEYS.iter().chain(&EXPLICIT_RATE_KEYS) {
        if *k == key {
            return k;
        }
    }
    match key {
        "g1" => "g1",
        "g2" => "g2",
        "j" => "j",
        "theta" => "theta",
        "fock_dim" => "fock_dim",
        "dt" => "dt",
        "t_max" => "t_max",
        "record_every" => "record_every",
        "output_path" => "output_path",
        _ => unreachable!("unknown keys are rejected during parsing"),
    }
}

impl RunConfig {
    /// Apply defaults and validate. Defaults: g1 = g2 = 1, J = 1.2,
    /// θ = π/4, ξ = 0.03, ζ = 0.001, fock_dim = 2, dt = 0.002.
    pub fn resolve(&self) -> Result<ResolvedRun, ConfigError> {
        let has_explicit = [
            self.kappa_a,
            self.kappa_b,
            self.gamma_1,
            self.gamma_phi_1,
            self.gamma_2,
            self.gamma_phi_2,
        ]
        .iter()
        .any(Option::is_some);

        let rates = if has_explicit {
            DecoherenceRates {
                kappa_a: self.kappa_a.unwrap_or(0.0),
                kappa_b: self.kappa_b.unwrap_or(0.0),
                gamma_1: self.gamma_1.unwrap_or(0.0),
                gamma_phi_1: self.gamma_phi_1.unwrap_or(0.0),
                gamma_2: self.gamma_2.unwrap_or(0.0),
                gamma_phi_2: self.gamma_phi_2.unwrap_or(0.0),
            }
        } else {
            DecoherenceRates::uniform_xi_zeta(
                self.xi.unwrap_or(0.03),
                self.zeta.unwrap_or(0.001),
            )
        };

        let params = ModelParams::new(
            self.g1.unwrap_or(1.0),
            self.g2.unwrap_or(1.0),
            self.j.unwrap_or(1.2),
            self.theta.unwrap_or(std::f64::consts::FRAC_PI_4),
            rates,
            self.fock_dim.unwrap_or(2),
        )
        .map_err(|e| ConfigError::global(e.to_string()))?;

        let dt = self.dt.unwrap_or(IntegratorConfig::DEFAULT_DT);
        if !(dt > 0.0) {
            return Err(ConfigError::global(format!("dt must be positive, got {dt}")));
        }
        if let Some(t_max) = self.t_max {
            if !(t_max > 0.0) {
                return Err(ConfigError::global(format!(
                    "t_max must be positive, got {t_max}"
                )));
            }
        }
        if self.record_every == Some(0) {
            return Err(ConfigError::global("record_every must be positive"));
        }

        Ok(ResolvedRun {
            params,
            dt,
            t_max: self.t_max,
            record_every: self.record_every,
            output_path: self.output_path.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_defaults_and_values() {
        let text = "\
# small-regime run
j = 0.1
theta = 0.7853981633974483

xi = 0.03   # the four fast channels
zeta = 0.001
";
        let resolved = parse_config(text).unwrap().resolve().unwrap();
        assert_eq!(resolved.params.j, 0.1);
        assert_eq!(resolved.params.g1, 1.0);
        assert_eq!(resolved.params.rates.kappa_b, 0.03);
        assert_eq!(resolved.params.rates.gamma_phi_2, 0.001);
        assert_eq!(resolved.dt, 0.002);
        assert!(resolved.t_max.is_none());
    }

    #[test]
    fn rejects_unknown_keys_with_line_numbers() {
        let err = parse_config("j = 1.0\nfrobnicate = 3\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("frobnicate"));
    }

    #[test]
    fn rejects_malformed_lines_and_duplicates() {
        assert_eq!(parse_config("just words\n").unwrap_err().line, Some(1));
        let err = parse_config("j = 1\nj = 2\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("duplicate"));
        let err = parse_config("j = abc\n").unwrap_err();
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn shorthand_and_explicit_rates_are_exclusive() {
        let err = parse_config("xi = 0.03\nkappa_a = 0.1\n").unwrap_err();
        assert!(err.message.contains("mutually exclusive"));

        // explicit-only resolves with unset channels at zero
        let resolved = parse_config("kappa_a = 0.05\n").unwrap().resolve().unwrap();
        assert_eq!(resolved.params.rates.kappa_a, 0.05);
        assert_eq!(resolved.params.rates.gamma_1, 0.0);
    }

    #[test]
    fn resolve_validates_physics() {
        assert!(parse_config("theta = 3.0\n").unwrap().resolve().is_err());
        assert!(parse_config("g1 = -1\n").unwrap().resolve().is_err());
        assert!(parse_config("dt = -0.1\n").unwrap().resolve().is_err());
        assert!(parse_config("t_max = 0\n").unwrap().resolve().is_err());
        assert!(parse_config("record_every = 0\n").unwrap().resolve().is_err());
    }
}

//! Run configuration: a TOML file plus compact command-line specs
//! (`euclid:3`, `dr:2,1`, `power:0.5`, ...) that parse into library types.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{ClassifyError, Nonlinearity, Psi, RadialWeight};
use crate::geometry::{GeometryError, Space};
use crate::numerics::Tolerance;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("bad {field} spec '{spec}': {detail}")]
    BadSpec { field: &'static str, spec: String, detail: String },
    #[error("invalid config: {detail}")]
    Invalid { detail: String },
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config file: {0}")]
    Toml(#[from] Box<toml::de::Error>),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Parse `euclid:d` or `dr:p,q`.
pub fn parse_space_spec(spec: &str) -> Result<Space, ConfigError> {
    let bad = |detail: &str| ConfigError::BadSpec { field: "space", spec: spec.into(), detail: detail.into() };
    let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("expected 'euclid:d' or 'dr:p,q'"))?;
    match kind {
        "euclid" => {
            let d: u32 = rest.trim().parse().map_err(|_| bad("dimension must be an integer"))?;
            Ok(Space::euclidean(d)?)
        }
        "dr" => {
            let (p, q) = rest.split_once(',').ok_or_else(|| bad("expected 'dr:p,q'"))?;
            let p: u32 = p.trim().parse().map_err(|_| bad("p must be an integer"))?;
            let q: u32 = q.trim().parse().map_err(|_| bad("q must be an integer"))?;
            Ok(Space::damek_ricci(p, q)?)
        }
        other => Err(bad(&format!("unknown space kind '{other}'"))),
    }
}

/// Parse `linear`, `sqrt`, or `power:gamma` with `0 < gamma <= 1`.
pub fn parse_psi_spec(spec: &str) -> Result<Psi, ConfigError> {
    let bad = |detail: &str| ConfigError::BadSpec { field: "psi", spec: spec.into(), detail: detail.into() };
    match spec {
        "linear" => Ok(Psi::linear()),
        "linear_plus_one" => Ok(Psi::LinearPlusOne),
        "sqrt" => Ok(Psi::sqrt()),
        _ => {
            let rest = spec
                .strip_prefix("power:")
                .ok_or_else(|| bad("expected 'linear', 'linear_plus_one', 'sqrt', or 'power:gamma'"))?;
            let gamma: f64 = rest.trim().parse().map_err(|_| bad("gamma must be a number"))?;
            if !(gamma > 0.0 && gamma <= 1.0) {
                return Err(bad("gamma must satisfy 0 < gamma <= 1 (sublinearity)"));
            }
            Ok(Psi::Power { gamma })
        }
    }
}

/// Parse `constant[:value]`, `exp:rate[,value]`, or `power:exponent[,value]`.
pub fn parse_weight_spec(spec: &str) -> Result<RadialWeight, ConfigError> {
    let bad = |detail: &str| ConfigError::BadSpec { field: "weight", spec: spec.into(), detail: detail.into() };
    let (kind, rest) = match spec.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (spec, None),
    };
    let parse_pair = |rest: &str| -> Result<(f64, f64), ConfigError> {
        match rest.split_once(',') {
            Some((a, b)) => Ok((
                a.trim().parse().map_err(|_| bad("expected numbers"))?,
                b.trim().parse().map_err(|_| bad("expected numbers"))?,
            )),
            None => Ok((rest.trim().parse().map_err(|_| bad("expected a number"))?, 1.0)),
        }
    };
    match kind {
        "constant" => {
            let value = match rest {
                Some(r) => r.trim().parse().map_err(|_| bad("value must be a number"))?,
                None => 1.0,
            };
            if !(value >= 0.0) {
                return Err(bad("constant weight must be >= 0"));
            }
            Ok(RadialWeight::Constant { value })
        }
        "exp" => {
            let (rate, value) = parse_pair(rest.ok_or_else(|| bad("expected 'exp:rate[,value]'"))?)?;
            if !(rate > 0.0) || !(value > 0.0) {
                return Err(bad("exp weight needs rate > 0 and value > 0"));
            }
            Ok(RadialWeight::Exp { rate, value })
        }
        "power" => {
            let (exponent, value) = parse_pair(rest.ok_or_else(|| bad("expected 'power:exponent[,value]'"))?)?;
            if !(value > 0.0) || !exponent.is_finite() {
                return Err(bad("power weight needs a finite exponent and value > 0"));
            }
            Ok(RadialWeight::Power { exponent, value })
        }
        other => Err(bad(&format!("unknown weight kind '{other}'"))),
    }
}

/// Everything a command run needs, serializable for the report echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Space spec: `euclid:d` or `dr:p,q`.
    pub space: String,
    /// Psi spec: `linear`, `sqrt`, or `power:gamma`.
    pub psi: String,
    /// Weight spec: `constant[:v]`, `exp:rate[,v]`, or `power:exponent[,v]`.
    pub weight: String,
    /// Solve mode: `ball`, `bounded`, or `large`.
    pub mode: String,
    /// Center value for shooting / large solutions.
    pub alpha: f64,
    /// Boundary data for ball / bounded solutions.
    pub c: f64,
    /// Ball radius or entire-solution horizon.
    pub r_max: f64,
    /// Absolute tolerance driving the run.
    pub tol: f64,
    /// Monte-Carlo seed.
    pub seed: u64,
    /// Explicit expanding-ball schedule; derived from `r_max` when empty.
    pub schedule: Vec<f64>,
    /// Verification suites to run (empty = all).
    pub suites: Vec<String>,
    /// Cap for the Green-estimate ratio spread (the documented bound is 10).
    pub green_ratio_cap: f64,
    /// Output directory; no files are written when empty. Excluded from
    /// serialized reports so the same run is byte-identical wherever it is
    /// written.
    #[serde(skip_serializing)]
    pub out: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            space: "euclid:3".into(),
            psi: "sqrt".into(),
            weight: "constant:1".into(),
            mode: "ball".into(),
            alpha: 1.0,
            c: 1.0,
            r_max: 1.0,
            tol: 1e-8,
            seed: 1,
            schedule: Vec::new(),
            suites: Vec::new(),
            green_ratio_cap: 10.0,
            out: String::new(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(Box::new)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.space()?;
        self.nonlinearity()?;
        if !(self.tol > 0.0) {
            return Err(ConfigError::Invalid { detail: format!("tol must be > 0, got {}", self.tol) });
        }
        if !(self.r_max > 0.0) {
            return Err(ConfigError::Invalid { detail: format!("r_max must be > 0, got {}", self.r_max) });
        }
        if !matches!(self.mode.as_str(), "ball" | "bounded" | "large") {
            return Err(ConfigError::Invalid { detail: format!("mode must be ball|bounded|large, got '{}'", self.mode) });
        }
        if self.schedule.iter().any(|r| !(r > &0.0)) || self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Invalid { detail: "schedule must be positive and increasing".into() });
        }
        Ok(())
    }

    pub fn space(&self) -> Result<Space, ConfigError> {
        parse_space_spec(&self.space)
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity, ConfigError> {
        Ok(Nonlinearity::separable(parse_weight_spec(&self.weight)?, parse_psi_spec(&self.psi)?)?)
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance { abs: self.tol, rel: 0.0, max_subdivisions: 2000, max_iterations: 40_000 }
    }

    /// The expanding-ball schedule: the explicit one, or a doubling ladder
    /// `r_max, 2 r_max, ..., 16 r_max` when none is given.
    pub fn effective_schedule(&self) -> Vec<f64> {
        if !self.schedule.is_empty() {
            return self.schedule.clone();
        }
        (0..=4).map(|k| self.r_max * (1u32 << k) as f64).collect()
    }
}

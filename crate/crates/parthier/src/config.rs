//! Pipeline configuration: a flat TOML file whose keys can be overridden by
//! command-line flags.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use parthier_core::random::LIFT_EXPONENT;
use parthier_core::{FilterConfig, MatchConfig, RhoPolicy, SolverParams};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ρ` as written in configs and flags: a number, `sqrt`, or `<c>xsqrt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSpec(pub RhoPolicy);

impl FromStr for RhoSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let policy = if s == "sqrt" {
            RhoPolicy::SqrtAreaMultiple(1.0)
        } else if let Some(c) = s.strip_suffix("xsqrt") {
            RhoPolicy::SqrtAreaMultiple(c.parse().map_err(|_| format!("bad rho multiple `{c}`"))?)
        } else {
            RhoPolicy::Explicit(
                s.parse().map_err(|_| format!("rho must be a number, `sqrt` or `<c>xsqrt`, got `{s}`"))?,
            )
        };
        Ok(RhoSpec(policy))
    }
}

impl fmt::Display for RhoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            RhoPolicy::Explicit(rho) => write!(f, "{rho}"),
            RhoPolicy::SqrtAreaMultiple(1.0) => write!(f, "sqrt"),
            RhoPolicy::SqrtAreaMultiple(c) => write!(f, "{c}xsqrt"),
        }
    }
}

impl Serialize for RhoSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RhoSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(rho) => Ok(RhoSpec(RhoPolicy::Explicit(rho))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub rho: RhoSpec,
    pub tol: f64,
    /// `None` lets the solver pick `max(20·√N, 2N)`.
    pub max_iter: Option<usize>,
    pub seed_min_frac: f64,
    pub part_min_frac: f64,
    pub adjacency_filter: bool,
    pub exponent: f64,
    pub tau: f64,
    pub sigma_area: f64,
    pub sigma_w: f64,
    pub include_root: bool,
    pub vertex_cap: usize,
    pub num_samples: usize,
    pub base_seed: u64,
    pub max_splits: usize,
    pub levels: usize,
    pub scale: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let solver = SolverParams::default();
        let filters = FilterConfig::default();
        let matcher = MatchConfig::default();
        PipelineConfig {
            rho: RhoSpec(solver.rho_policy),
            tol: solver.tol,
            max_iter: solver.max_iter,
            seed_min_frac: filters.seed_min_frac,
            part_min_frac: filters.part_min_frac,
            adjacency_filter: filters.adjacency_filter,
            exponent: LIFT_EXPONENT,
            tau: matcher.tau,
            sigma_area: matcher.sigma_area,
            sigma_w: matcher.sigma_w,
            include_root: matcher.include_root,
            vertex_cap: matcher.vertex_cap,
            num_samples: 16,
            base_seed: 0,
            max_splits: parthier_core::random::MAX_ENUMERATED_SPLITS,
            levels: 12,
            scale: 4,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        let config: PipelineConfig = toml::from_str(text).map_err(|e| Error::invalid(path, e.to_string()))?;
        config.validate().map_err(|msg| Error::invalid(path, msg))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_toml(&text, path)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let in_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(format!("{name} must lie in (0, 1), got {v}"))
            }
        };
        in_unit("seed_min_frac", self.seed_min_frac)?;
        in_unit("part_min_frac", self.part_min_frac)?;
        if !(self.exponent > 0.0) {
            return Err(format!("exponent must be positive, got {}", self.exponent));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(format!("tau must lie in [0, 1), got {}", self.tau));
        }
        if !(self.sigma_area > 0.0 && self.sigma_w > 0.0) {
            return Err("sigma_area and sigma_w must be positive".into());
        }
        if !(self.tol > 0.0) {
            return Err(format!("tol must be positive, got {}", self.tol));
        }
        if self.num_samples == 0 {
            return Err("num_samples must be at least 1".into());
        }
        Ok(())
    }

    pub fn solver_params(&self) -> SolverParams {
        SolverParams { rho_policy: self.rho.0, tol: self.tol, max_iter: self.max_iter }
    }

    pub fn filter_config(&self) -> FilterConfig {
        FilterConfig {
            seed_min_frac: self.seed_min_frac,
            part_min_frac: self.part_min_frac,
            adjacency_filter: self.adjacency_filter,
        }
    }

    pub fn match_config(&self) -> MatchConfig {
        MatchConfig {
            tau: self.tau,
            sigma_area: self.sigma_area,
            sigma_w: self.sigma_w,
            include_root: self.include_root,
            vertex_cap: self.vertex_cap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_documented_constants() {
        let c = PipelineConfig::default();
        assert_eq!((c.seed_min_frac, c.part_min_frac, c.exponent), (0.0005, 0.005, 4.0));
        assert_eq!(c.rho, RhoSpec(RhoPolicy::SqrtAreaMultiple(1.0)));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn rho_specs() {
        assert_eq!("2xsqrt".parse(), Ok(RhoSpec(RhoPolicy::SqrtAreaMultiple(2.0))));
        assert_eq!("sqrt".parse(), Ok(RhoSpec(RhoPolicy::SqrtAreaMultiple(1.0))));
        assert_eq!("12.5".parse(), Ok(RhoSpec(RhoPolicy::Explicit(12.5))));
        assert!("fast".parse::<RhoSpec>().is_err());
        for s in ["2xsqrt", "sqrt", "12.5"] {
            assert_eq!(s.parse::<RhoSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn toml_keys_override_defaults() {
        let c =
            PipelineConfig::from_toml("rho = \"3xsqrt\"\ntau = 0.2\nadjacency_filter = false\n", Path::new("c.toml"))
                .unwrap();
        assert_eq!(c.rho, RhoSpec(RhoPolicy::SqrtAreaMultiple(3.0)));
        assert_eq!(c.tau, 0.2);
        assert!(!c.adjacency_filter);
        assert_eq!(c.num_samples, PipelineConfig::default().num_samples);
        let numeric = PipelineConfig::from_toml("rho = 40\n", Path::new("c.toml")).unwrap();
        assert_eq!(numeric.rho, RhoSpec(RhoPolicy::Explicit(40.0)));
    }

    #[test]
    fn bad_configs_are_rejected() {
        for text in ["seed_min_frac = 1.5", "exponent = 0", "tau = 1.0", "unknown_key = 3", "num_samples = 0"] {
            assert!(PipelineConfig::from_toml(text, Path::new("c.toml")).is_err(), "{text}");
        }
    }
}

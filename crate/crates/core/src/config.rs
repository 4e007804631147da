//! Flat `key = value` configuration files for the solvers and CLI.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ns::{ConvectionScheme, SolverConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {0}: expected 'key = value', got '{1}'")]
    BadLine(usize, String),
    #[error("key '{0}': {1}")]
    BadValue(String, String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parsed key/value pairs; `#` starts a comment.
#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::BadLine(lineno + 1, raw.to_string()));
            };
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| ConfigError::BadValue(key.into(), format!("{e}")))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| ConfigError::BadValue(key.into(), format!("{e}")))
            })
            .transpose()
    }

    /// Solver settings recognized: `dt`, `max_steps`, `steady_tol`,
    /// `convection_scheme`, `quad_order`.
    pub fn solver_config(&self) -> Result<SolverConfig, ConfigError> {
        let mut cfg = SolverConfig::default();
        if let Some(dt) = self.get_f64("dt")? {
            cfg.dt = Some(dt);
        }
        if let Some(ms) = self.get_usize("max_steps")? {
            cfg.max_steps = ms;
        }
        if let Some(tol) = self.get_f64("steady_tol")? {
            cfg.steady_tol = tol;
        }
        if let Some(q) = self.get_usize("quad_order")? {
            cfg.quad_order = q;
        }
        if let Some(s) = self.get("convection_scheme") {
            cfg.convection_scheme = ConvectionScheme::parse(s)
                .ok_or_else(|| ConfigError::BadValue("convection_scheme".into(), s.into()))?;
        }
        Ok(cfg)
    }
}

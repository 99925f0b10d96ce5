//! Run configuration: defaults, a `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::checks::CheckName;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BModeArg {
    Limit,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub deltas: Vec<f64>,
    pub eps: Vec<f64>,
    pub d: f64,
    pub ode_tol: f64,
    pub quad_tol: f64,
    pub fit_tol: f64,
    pub r_max: f64,
    pub level: usize,
    pub out: PathBuf,
    pub checks: Vec<CheckName>,
    pub b_mode: BModeArg,
    pub b_delta: f64,
    pub g_samples: usize,
    pub threads: usize,
    pub seed_free: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 4,
            p: 3.0,
            alpha: 1.0,
            beta: 1.0,
            deltas: vec![0.04, 0.02, 0.01],
            eps: vec![0.1, 0.05, 0.025],
            d: 0.2,
            ode_tol: 1e-12,
            quad_tol: 1e-6,
            fit_tol: 0.05,
            r_max: 1e4,
            level: 0,
            out: PathBuf::from("out"),
            checks: CheckName::ALL.to_vec(),
            b_mode: BModeArg::Limit,
            b_delta: 0.01,
            g_samples: 201,
            threads: 0,
            seed_free: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn real(key: &str, v: &str) -> Result<f64, ConfigError> {
    lane_emden::params::parse_real(v).or_else(|_| err(format!("{key}: '{v}' is not a number")))
}

fn count(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim()
        .parse()
        .or_else(|_| err(format!("{key}: '{v}' is not a nonnegative integer")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|x| real(key, x.trim())).collect()
}

fn flag(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => err(format!("{key}: '{v}' is not a boolean")),
    }
}

pub fn parse_checks(v: &str) -> Result<Vec<CheckName>, ConfigError> {
    let mut out = Vec::new();
    for name in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let items = if name == "all" {
            CheckName::ALL.to_vec()
        } else {
            vec![CheckName::parse(name)
                .ok_or_else(|| ConfigError(format!("unknown check '{name}'")))?]
        };
        for c in items {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    if out.is_empty() {
        return err("no checks selected");
    }
    Ok(out)
}

pub fn parse_b_mode(v: &str) -> Result<BModeArg, ConfigError> {
    match v.trim() {
        "limit" => Ok(BModeArg::Limit),
        "delta" => Ok(BModeArg::Delta),
        other => err(format!("b-mode: '{other}' is neither 'limit' nor 'delta'")),
    }
}

impl RunConfig {
    /// Applies one `key = value` setting; keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "n" => self.n = count(&key, v)?,
            "p" => self.p = real(&key, v)?,
            "alpha" => self.alpha = real(&key, v)?,
            "beta" => self.beta = real(&key, v)?,
            "deltas" => self.deltas = list(&key, v)?,
            "eps" => self.eps = list(&key, v)?,
            "d" => self.d = real(&key, v)?,
            "ode_tol" => self.ode_tol = real(&key, v)?,
            "quad_tol" => self.quad_tol = real(&key, v)?,
            "fit_tol" => self.fit_tol = real(&key, v)?,
            "r_max" => self.r_max = real(&key, v)?,
            "level" => self.level = count(&key, v)?,
            "out" => self.out = PathBuf::from(v),
            "checks" => self.checks = parse_checks(v)?,
            "b_mode" => self.b_mode = parse_b_mode(v)?,
            "delta" | "b_delta" => self.b_delta = real(&key, v)?,
            "g_samples" => self.g_samples = count(&key, v)?,
            "threads" => self.threads = count(&key, v)?,
            "seed_free" => self.seed_free = flag(&key, v)?,
            _ => return err(format!("unknown config key '{key}'")),
        }
        Ok(())
    }

    /// Applies a config file: one `key = value` per line, `#` comments.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("{origin}:{}: expected 'key = value'", i + 1))
            })?;
            self.set(k, v)
                .map_err(|e| ConfigError(format!("{origin}:{}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("ode_tol", self.ode_tol),
            ("quad_tol", self.quad_tol),
            ("fit_tol", self.fit_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return err(format!("{name} = {v} must be positive"));
            }
        }
        if self.ode_tol > 1e-4 {
            return err(format!("ode_tol = {} must not exceed 1e-4", self.ode_tol));
        }
        if !(self.r_max >= 100.0 && self.r_max.is_finite()) {
            return err(format!("r_max = {} must be at least 100", self.r_max));
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(*d > 0.0 && *d <= 0.2)) {
            return err("delta samples must lie in (0, 0.2]");
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0 && *e <= 0.1)) {
            return err("epsilon samples must lie in (0, 0.1]");
        }
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return err("alpha and beta must be nonnegative");
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return err(format!("d = {} must be positive", self.d));
        }
        if self.g_samples < 2 {
            return err("g_samples must be at least 2");
        }
        if self.level > 3 {
            return err(format!("level = {} exceeds 3", self.level));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_validate() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# comment\np = 2.5\ndeltas = 0.04, 0.02\nb-mode = delta  # trailing\n",
            "t",
        )
        .unwrap();
        assert_eq!(c.p, 2.5);
        assert_eq!(c.deltas, vec![0.04, 0.02]);
        assert_eq!(c.b_mode, BModeArg::Delta);
        c.validate().unwrap();
    }

    #[test]
    fn malformed_input_is_reported_with_line() {
        let mut c = RunConfig::default();
        let e = c.apply_text("p = 3\nbogus = 1\n", "cfg").unwrap_err();
        assert!(e.0.contains("cfg:2") && e.0.contains("bogus"), "{e}");
        assert!(c.apply_text("just words\n", "cfg").is_err());
        assert!(c.apply_text("p = three\n", "cfg").is_err());
    }

    #[test]
    fn invariants() {
        for c in [
            RunConfig {
                eps: vec![0.2],
                ..RunConfig::default()
            },
            RunConfig {
                deltas: vec![0.3],
                ..RunConfig::default()
            },
            RunConfig {
                quad_tol: 0.0,
                ..RunConfig::default()
            },
        ] {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn check_lists() {
        assert_eq!(
            parse_checks("lemc1,lemb8").unwrap(),
            vec![CheckName::BoundaryLoss, CheckName::PhiPairing]
        );
        assert_eq!(parse_checks("all").unwrap().len(), CheckName::ALL.len());
        assert!(parse_checks("nope").is_err());
        assert!(parse_checks(" , ").is_err());
    }
}

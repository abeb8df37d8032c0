//! Flat `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. Every
//! key is optional and falls back to the reference scenario, but unknown or
//! repeated keys are rejected.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use micromaser_core::dynamics::{AtomPrep, ModelParams, LEAKAGE_LIMIT};
use micromaser_core::experiments::{REFERENCE_N_ATOMS, REFERENCE_N_BAR, REFERENCE_TAU};
use micromaser_core::{FockSpace, GridSpec, RunConfig, TauScan, C64};
use thiserror::Error;

/// Refinement rounds used by `optimize`.
pub const REFINE_ITERS: usize = 1;

pub const KEYS: [&str; 21] = [
    "n_bar",
    "cutoff",
    "chi_over_lambda",
    "delta_over_lambda",
    "eps_re",
    "eps_im",
    "tau",
    "atom_a",
    "atom_b",
    "atom_phi",
    "n_atoms",
    "snapshots",
    "q_xmin",
    "q_xmax",
    "q_ymin",
    "q_ymax",
    "q_nx",
    "q_ny",
    "tau_scan_lo",
    "tau_scan_hi",
    "tau_scan_step",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value {value:?} for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub n_bar: f64,
    pub cutoff: usize,
    pub chi_over_lambda: f64,
    pub delta_over_lambda: f64,
    pub eps_re: f64,
    pub eps_im: f64,
    pub tau: f64,
    pub atom_a: f64,
    pub atom_b: f64,
    pub atom_phi: f64,
    pub n_atoms: usize,
    pub snapshots: Vec<usize>,
    pub q_xmin: f64,
    pub q_xmax: f64,
    pub q_ymin: f64,
    pub q_ymax: f64,
    pub q_nx: usize,
    pub q_ny: usize,
    pub tau_scan_lo: Option<f64>,
    pub tau_scan_hi: Option<f64>,
    pub tau_scan_step: Option<f64>,
}

impl Default for ConfigFile {
    fn default() -> Self {
        let params = ModelParams::default();
        let grid = GridSpec::default();
        Self {
            n_bar: REFERENCE_N_BAR,
            cutoff: params.cutoff(),
            chi_over_lambda: params.chi_over_lambda,
            delta_over_lambda: params.delta_over_lambda,
            eps_re: params.eps.re,
            eps_im: params.eps.im,
            tau: REFERENCE_TAU,
            atom_a: 1.0,
            atom_b: 0.0,
            atom_phi: 0.0,
            n_atoms: REFERENCE_N_ATOMS,
            snapshots: Vec::new(),
            q_xmin: grid.x_min,
            q_xmax: grid.x_max,
            q_ymin: grid.y_min,
            q_ymax: grid.y_max,
            q_nx: grid.nx,
            q_ny: grid.ny,
            tau_scan_lo: None,
            tau_scan_hi: None,
            tau_scan_step: None,
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn parse_real(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_value(line, key, value)?;
    if !x.is_finite() {
        return Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
            reason: "not a finite number".into(),
        });
    }
    Ok(x)
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(line, key, s))
        .collect()
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: content.to_string(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let known =
                KEYS.iter()
                    .find(|&&k| k == key)
                    .ok_or_else(|| ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })?;
            if seen.contains(known) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            seen.push(known);
            match key {
                "n_bar" => cfg.n_bar = parse_real(line, key, value)?,
                "cutoff" => cfg.cutoff = parse_value(line, key, value)?,
                "chi_over_lambda" => cfg.chi_over_lambda = parse_real(line, key, value)?,
                "delta_over_lambda" => cfg.delta_over_lambda = parse_real(line, key, value)?,
                "eps_re" => cfg.eps_re = parse_real(line, key, value)?,
                "eps_im" => cfg.eps_im = parse_real(line, key, value)?,
                "tau" => cfg.tau = parse_real(line, key, value)?,
                "atom_a" => cfg.atom_a = parse_real(line, key, value)?,
                "atom_b" => cfg.atom_b = parse_real(line, key, value)?,
                "atom_phi" => cfg.atom_phi = parse_real(line, key, value)?,
                "n_atoms" => cfg.n_atoms = parse_value(line, key, value)?,
                "snapshots" => cfg.snapshots = parse_list(line, key, value)?,
                "q_xmin" => cfg.q_xmin = parse_real(line, key, value)?,
                "q_xmax" => cfg.q_xmax = parse_real(line, key, value)?,
                "q_ymin" => cfg.q_ymin = parse_real(line, key, value)?,
                "q_ymax" => cfg.q_ymax = parse_real(line, key, value)?,
                "q_nx" => cfg.q_nx = parse_value(line, key, value)?,
                "q_ny" => cfg.q_ny = parse_value(line, key, value)?,
                "tau_scan_lo" => cfg.tau_scan_lo = Some(parse_real(line, key, value)?),
                "tau_scan_hi" => cfg.tau_scan_hi = Some(parse_real(line, key, value)?),
                "tau_scan_step" => cfg.tau_scan_step = Some(parse_real(line, key, value)?),
                _ => unreachable!("key list and match arms disagree"),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec {
            x_min: self.q_xmin,
            x_max: self.q_xmax,
            y_min: self.q_ymin,
            y_max: self.q_ymax,
            nx: self.q_nx,
            ny: self.q_ny,
        }
    }

    /// Validated core configuration. Snapshots get a Q grid.
    pub fn run_config(&self) -> Result<RunConfig, ConfigError> {
        let invalid = |e: micromaser_core::Error| ConfigError::Invalid(e.to_string());
        let space = FockSpace::new(self.cutoff).map_err(invalid)?;
        let atom = AtomPrep::new(self.atom_a, self.atom_b, self.atom_phi).map_err(invalid)?;
        let mut snapshots = self.snapshots.clone();
        snapshots.sort_unstable();
        snapshots.dedup();
        let config = RunConfig {
            params: ModelParams {
                chi_over_lambda: self.chi_over_lambda,
                delta_over_lambda: self.delta_over_lambda,
                eps: C64::new(self.eps_re, self.eps_im),
                tau: self.tau,
                space,
            },
            atom,
            n_atoms: self.n_atoms,
            n_bar: self.n_bar,
            snapshots,
            grid: Some(self.grid()),
            leakage_limit: LEAKAGE_LIMIT,
        };
        config.validate().map_err(invalid)?;
        let grid_too_wide = self.grid().max_beta_sq() > self.cutoff as f64 / 2.0;
        if !config.snapshots.is_empty() && grid_too_wide {
            return Err(ConfigError::Invalid(format!(
                "Q grid reaches |beta|^2 = {} but cutoff {} only supports {}",
                self.grid().max_beta_sq(),
                self.cutoff,
                self.cutoff as f64 / 2.0
            )));
        }
        Ok(config)
    }

    pub fn tau_scan(&self) -> Result<TauScan, ConfigError> {
        let scan = TauScan {
            lo: self
                .tau_scan_lo
                .ok_or(ConfigError::Missing("tau_scan_lo"))?,
            hi: self
                .tau_scan_hi
                .ok_or(ConfigError::Missing("tau_scan_hi"))?,
            step: self
                .tau_scan_step
                .ok_or(ConfigError::Missing("tau_scan_step"))?,
            refine_iters: REFINE_ITERS,
        };
        scan.validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(scan)
    }

    /// Every key, one per line, in a form [`ConfigFile::parse`] reads back
    /// to an identical value.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        put("n_bar", fmt_real(self.n_bar));
        put("cutoff", self.cutoff.to_string());
        put("chi_over_lambda", fmt_real(self.chi_over_lambda));
        put("delta_over_lambda", fmt_real(self.delta_over_lambda));
        put("eps_re", fmt_real(self.eps_re));
        put("eps_im", fmt_real(self.eps_im));
        put("tau", fmt_real(self.tau));
        put("atom_a", fmt_real(self.atom_a));
        put("atom_b", fmt_real(self.atom_b));
        put("atom_phi", fmt_real(self.atom_phi));
        put("n_atoms", self.n_atoms.to_string());
        put(
            "snapshots",
            self.snapshots
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        put("q_xmin", fmt_real(self.q_xmin));
        put("q_xmax", fmt_real(self.q_xmax));
        put("q_ymin", fmt_real(self.q_ymin));
        put("q_ymax", fmt_real(self.q_ymax));
        put("q_nx", self.q_nx.to_string());
        put("q_ny", self.q_ny.to_string());
        for (k, v) in [
            ("tau_scan_lo", self.tau_scan_lo),
            ("tau_scan_hi", self.tau_scan_hi),
            ("tau_scan_step", self.tau_scan_step),
        ] {
            if let Some(v) = v {
                put(k, fmt_real(v));
            }
        }
        s
    }
}

/// Shortest text that parses back to the same `f64`, always with a decimal
/// point so the value reads as a real.
fn fmt_real(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains(['.', 'e', 'E']) {
        s
    } else {
        format!("{s}.0")
    }
}

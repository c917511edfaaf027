//! Run configuration with three-layer precedence: built-in defaults, then a
//! flat `key = value` config file, then command-line flags. Unknown keys are
//! rejected rather than ignored so that typos cannot silently fall back to
//! defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::{CliError, Result};

/// Largest supported prime cutoff Y (sieve memory scales linearly with it).
pub const Y_CAP_LIMIT: u64 = 100_000_000;

/// Resonator scale: a fixed value, or 99% of the admissible supremum for the
/// run's sigma/epsilon/GRH mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AParam {
    Auto,
    Fixed(f64),
}

impl fmt::Display for AParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AParam::Auto => write!(f, "auto"),
            AParam::Fixed(v) => write!(f, "{v}"),
        }
    }
}

/// Everything a scan or single resonate run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub q_min: u64,
    pub q_max: u64,
    /// Number of log-spaced prime targets; `None` visits every prime in
    /// `[q_min, q_max]`.
    pub count: Option<usize>,
    pub sigma_list: Vec<f64>,
    pub theta_list: Vec<f64>,
    pub a: AParam,
    /// Zero-density offset; `None` takes the library default (clamped to
    /// half the distance from sigma down to 1/2).
    pub epsilon: Option<f64>,
    pub grh: bool,
    /// Cap on the prime cutoff Y of the truncated sums.
    pub y_cap: u64,
    /// Fixed resonator cutoff X; `None` uses A log(q) loglog(q).
    pub x_override: Option<f64>,
    /// Worker threads for scan tasks; 0 means one per available CPU.
    pub workers: usize,
    pub out: Option<PathBuf>,
    /// Seed for the randomized spot checks in `verify`.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q_min: 1_000,
            q_max: 100_000,
            count: Some(50),
            sigma_list: vec![0.75],
            theta_list: vec![0.0],
            a: AParam::Auto,
            epsilon: None,
            grh: false,
            y_cap: 10_000_000,
            x_override: None,
            workers: 0,
            out: None,
            seed: 1,
        }
    }
}

impl RunConfig {
    /// Merge a config file into `self` (later layers override earlier ones).
    ///
    /// Format: one `key = value` pair per line; `#` starts a comment; blank
    /// lines are ignored. List values are comma-separated.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("config {}: {e}", path.display())))?;
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let where_ = format!("{} line {}", path.display(), i + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("{where_}: expected `key = value`, got `{line}`"))
            })?;
            self.set_key(key.trim(), value.trim(), &where_)?;
        }
        Ok(())
    }

    /// Apply a single `key = value` assignment, reporting `where_` on error.
    pub fn set_key(&mut self, key: &str, value: &str, where_: &str) -> Result<()> {
        match key {
            "q_min" => self.q_min = parse_u64(key, value, where_)?,
            "q_max" => self.q_max = parse_u64(key, value, where_)?,
            "count" => {
                self.count = if value == "all" {
                    None
                } else {
                    Some(parse_u64(key, value, where_)? as usize)
                }
            }
            "sigma_list" => self.sigma_list = parse_f64_list(key, value, where_)?,
            "theta_list" => self.theta_list = parse_f64_list(key, value, where_)?,
            "a" => {
                self.a = if value == "auto" {
                    AParam::Auto
                } else {
                    AParam::Fixed(parse_f64(key, value, where_)?)
                }
            }
            "epsilon" => self.epsilon = Some(parse_f64(key, value, where_)?),
            "grh" => self.grh = parse_bool(key, value, where_)?,
            "y_cap" => self.y_cap = parse_u64(key, value, where_)?,
            "x_override" => self.x_override = Some(parse_f64(key, value, where_)?),
            "workers" => self.workers = parse_u64(key, value, where_)? as usize,
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => self.seed = parse_u64(key, value, where_)?,
            other => {
                return Err(CliError::Validation(format!(
                    "{where_}: unknown key `{other}`"
                )))
            }
        }
        Ok(())
    }

    /// Check the cross-field invariants shared by every subcommand.
    pub fn validate(&self) -> Result<()> {
        if self.q_min > self.q_max {
            return Err(CliError::Validation(format!(
                "q_min = {} exceeds q_max = {}",
                self.q_min, self.q_max
            )));
        }
        if self.sigma_list.is_empty() {
            return Err(CliError::Validation("sigma_list is empty".into()));
        }
        for (i, &s) in self.sigma_list.iter().enumerate() {
            if !(s > 0.5 && s < 1.0) {
                return Err(CliError::Validation(format!(
                    "sigma = {s} outside the open window (1/2, 1)"
                )));
            }
            // duplicates would collide on the resume key and silently skip
            if self.sigma_list[..i].contains(&s) {
                return Err(CliError::Validation(format!(
                    "sigma_list repeats the value {s}"
                )));
            }
        }
        if self.theta_list.is_empty() {
            return Err(CliError::Validation("theta_list is empty".into()));
        }
        for (i, &t) in self.theta_list.iter().enumerate() {
            if !(0.0..=std::f64::consts::TAU).contains(&t) {
                return Err(CliError::Validation(format!(
                    "theta = {t} outside [0, 2 pi]"
                )));
            }
            if self.theta_list[..i].contains(&t) {
                return Err(CliError::Validation(format!(
                    "theta_list repeats the value {t}"
                )));
            }
        }
        if self.count == Some(0) {
            return Err(CliError::Validation(
                "count must be at least 1 (or `all`)".into(),
            ));
        }
        if let AParam::Fixed(a) = self.a {
            if !(a.is_finite() && a > 0.0) {
                return Err(CliError::Validation(format!(
                    "resonator scale a = {a} must be positive"
                )));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                return Err(CliError::Validation(format!(
                    "epsilon = {e} must be positive"
                )));
            }
        }
        if self.y_cap < 2 || self.y_cap > Y_CAP_LIMIT {
            return Err(CliError::Validation(format!(
                "y_cap = {} outside [2, {Y_CAP_LIMIT}]",
                self.y_cap
            )));
        }
        if let Some(x) = self.x_override {
            if !(x.is_finite() && x >= 0.0) {
                return Err(CliError::Validation(format!("x_override = {x} invalid")));
            }
        }
        Ok(())
    }

    /// Resolved number of scan worker threads.
    pub fn effective_workers(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        }
    }
}

fn parse_u64(key: &str, value: &str, where_: &str) -> Result<u64> {
    value.parse().map_err(|_| {
        CliError::Validation(format!("{where_}: `{key}` wants an integer, got `{value}`"))
    })
}

fn parse_f64(key: &str, value: &str, where_: &str) -> Result<f64> {
    value.parse().map_err(|_| {
        CliError::Validation(format!("{where_}: `{key}` wants a number, got `{value}`"))
    })
}

fn parse_bool(key: &str, value: &str, where_: &str) -> Result<bool> {
    match value {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(CliError::Validation(format!(
            "{where_}: `{key}` wants true/false, got `{value}`"
        ))),
    }
}

fn parse_f64_list(key: &str, value: &str, where_: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|part| parse_f64(key, part.trim(), where_))
        .collect()
}

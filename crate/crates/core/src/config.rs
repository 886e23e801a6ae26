//! Plain-text `key=value` solver configuration shared by both solvers.
//!
//! ```text
//! # comment
//! time_limit = 60
//! eps_regret = 1e-6
//! step_rule = backtracking
//! ```

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::error::{validation, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    Fixed,
    Backtracking,
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepRule::Fixed => "fixed",
            StepRule::Backtracking => "backtracking",
        })
    }
}

impl FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(StepRule::Fixed),
            "backtracking" => Ok(StepRule::Backtracking),
            _ => Err(validation(format!("unknown step rule '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    pub node_limit: Option<usize>,
    /// Largest regret accepted as an equilibrium certificate.
    pub eps_regret: f64,
    /// Constraint-violation tolerance for lifted incumbents.
    pub eps_feas: f64,
    pub workers: usize,
    /// Forces a single worker so reports are reproducible.
    pub deterministic: bool,
    pub max_starts: usize,
    pub max_iters: usize,
    pub step_rule: StepRule,
    /// Fixed step length for [`StepRule::Fixed`].
    pub step_size: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_limit: None,
            node_limit: None,
            eps_regret: 1e-6,
            eps_feas: 1e-7,
            workers: 1,
            deterministic: true,
            max_starts: 20,
            max_iters: 2000,
            step_rule: StepRule::Backtracking,
            step_size: 1e-5,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(seconds);
        self
    }

    pub fn with_node_limit(mut self, nodes: usize) -> Self {
        self.node_limit = Some(nodes);
        self
    }

    pub fn with_eps_regret(mut self, eps: f64) -> Self {
        self.eps_regret = eps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn effective_workers(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.workers.max(1)
        }
    }

    pub fn time_limit_duration(&self) -> Option<Duration> {
        self.time_limit.map(Duration::from_secs_f64)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(validation(format!("{name} must be positive and finite, got {v}")))
            }
        };
        if let Some(t) = self.time_limit {
            positive("time_limit", t)?;
        }
        positive("eps_regret", self.eps_regret)?;
        positive("eps_feas", self.eps_feas)?;
        positive("step_size", self.step_size)?;
        for (name, v) in [
            ("workers", self.workers),
            ("max_starts", self.max_starts),
            ("max_iters", self.max_iters),
            ("node_limit", self.node_limit.unwrap_or(1)),
        ] {
            if v == 0 {
                return Err(validation(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Parses `key=value` lines; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SolverConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |column: usize, message: String| Error::Parse {
                line: lineno + 1,
                column,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(1, format!("expected key=value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let column = raw.find(value).map_or(1, |c| c + 1);
            let bad = |what: &str| parse_err(column, format!("{key}: expected {what}, got '{value}'"));
            let float = || value.parse::<f64>().map_err(|_| bad("a number"));
            let int = || value.parse::<usize>().map_err(|_| bad("a non-negative integer"));
            match key {
                "time_limit" => cfg.time_limit = Some(float()?),
                "node_limit" => cfg.node_limit = Some(int()?),
                "eps_regret" => cfg.eps_regret = float()?,
                "eps_feas" => cfg.eps_feas = float()?,
                "workers" => cfg.workers = int()?,
                "deterministic" => {
                    cfg.deterministic = value.parse().map_err(|_| bad("true or false"))?
                }
                "max_starts" => cfg.max_starts = int()?,
                "max_iters" => cfg.max_iters = int()?,
                "step_rule" => cfg.step_rule = value.parse().map_err(|_| bad("fixed or backtracking"))?,
                "step_size" => cfg.step_size = float()?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("a 64-bit integer"))?,
                _ => return Err(validation(format!("unknown config key '{key}' on line {}", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SolverConfig {
    /// Canonical text form accepted by [`SolverConfig::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = self.time_limit {
            writeln!(f, "time_limit = {t}")?;
        }
        if let Some(n) = self.node_limit {
            writeln!(f, "node_limit = {n}")?;
        }
        writeln!(f, "eps_regret = {:e}", self.eps_regret)?;
        writeln!(f, "eps_feas = {:e}", self.eps_feas)?;
        writeln!(f, "workers = {}", self.workers)?;
        writeln!(f, "deterministic = {}", self.deterministic)?;
        writeln!(f, "max_starts = {}", self.max_starts)?;
        writeln!(f, "max_iters = {}", self.max_iters)?;
        writeln!(f, "step_rule = {}", self.step_rule)?;
        writeln!(f, "step_size = {:e}", self.step_size)?;
        writeln!(f, "seed = {}", self.seed)
    }
}

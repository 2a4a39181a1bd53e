//! TOML documents describing problems and campaigns.
//!
//! A problem document:
//!
//! ```toml
//! name = "rosenbrock"
//! n = 2
//! m = 2
//! h = "l1"                     # or "minimax"
//! x0 = [-1.2, 1.0]             # or: start = "registry" | "zeros"
//! lower = [-inf, -inf]         # optional box
//! upper = [inf, 2.0]
//!
//! [oracle]
//! registry = "rosenbrock"      # in-process residuals from the registry
//! # command = "demo_oracle --problem rosenbrock"
//!
//! [[inequality]]               # optional, a·x ≤ b
//! a = [1.0, 1.0]
//! b = 5.0
//! ```
//!
//! A campaign document:
//!
//! ```toml
//! problems = ["l1"]            # registry names, "l1", "minimax" or "all"
//! problem_files = []           # paths to problem documents, relative to this file
//! budget = 100                 # simplex gradients
//! tolerances = [1e-1, 1e-3, 1e-5, 1e-7]
//! jobs = 4
//!
//! [[solver]]
//! name = "TRFD-L1"
//! norm = "1"                   # "1", "inf" or "auto" (p = 1 if √m < n, else ∞)
//! # epsilon, alpha, theta, sigma, delta0, delta_star, stop_delta, stop_eta override the defaults
//! ```

use crate::driver::{Delta0Rule, EvalBudget, SigmaRule, TrfdParams};
use crate::norms::PNorm;
use crate::oracle::{timeout_from_env, BlackBoxOracle, OracleError};
use crate::outer::{OuterFunction, OuterKind};
use crate::problem::{FeasibleRegion, Problem, ProblemError};
use crate::testset::{self, BenchmarkProblem};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartRule {
    Registry,
    Zeros,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBinding {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityConfig {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub h: OuterKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    pub oracle: OracleBinding,
    #[serde(default, rename = "inequality", skip_serializing_if = "Vec::is_empty")]
    pub inequalities: Vec<InequalityConfig>,
}

impl ProblemConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&read(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("problem configs always serialize")
    }

    /// The registry entry as a document bound to an external oracle command.
    pub fn from_registry(p: &BenchmarkProblem, command: Option<&str>) -> Self {
        ProblemConfig {
            name: p.name.to_string(),
            n: p.n,
            m: p.m,
            h: p.family,
            x0: Some(p.x0.clone()),
            start: None,
            lower: None,
            upper: None,
            oracle: match command {
                Some(c) => OracleBinding {
                    registry: None,
                    command: Some(c.to_string()),
                },
                None => OracleBinding {
                    registry: Some(p.name.to_string()),
                    command: None,
                },
            },
            inequalities: Vec::new(),
        }
    }

    fn registry_entry(&self) -> Result<Option<BenchmarkProblem>, ConfigError> {
        match &self.oracle.registry {
            None => Ok(None),
            Some(name) => testset::find(name)
                .map(Some)
                .ok_or_else(|| ConfigError::Invalid(format!("unknown registry problem {name:?}"))),
        }
    }

    fn start_point(&self) -> Result<Vec<f64>, ConfigError> {
        match (&self.x0, self.start) {
            (Some(x0), None) => Ok(x0.clone()),
            (None, Some(StartRule::Zeros)) => Ok(vec![0.0; self.n]),
            (None, Some(StartRule::Registry)) => match self.registry_entry()? {
                Some(p) => Ok(p.x0),
                None => Err(ConfigError::Invalid("start = \"registry\" needs oracle.registry".into())),
            },
            (Some(_), Some(_)) => Err(ConfigError::Invalid("give either x0 or start, not both".into())),
            (None, None) => Err(ConfigError::Invalid("missing x0 or start".into())),
        }
    }

    fn region(&self) -> Result<FeasibleRegion, ConfigError> {
        let mut region = match (&self.lower, &self.upper) {
            (None, None) => FeasibleRegion::unconstrained(self.n),
            (lo, hi) => FeasibleRegion::boxed(
                lo.clone().unwrap_or_else(|| vec![f64::NEG_INFINITY; self.n]),
                hi.clone().unwrap_or_else(|| vec![f64::INFINITY; self.n]),
            )?,
        };
        for ineq in &self.inequalities {
            region = region.with_inequality(ineq.a.clone(), ineq.b)?;
        }
        Ok(region)
    }

    /// Builds the problem, spawning the external oracle if one is bound.
    pub fn build(&self) -> Result<Problem, ConfigError> {
        let oracle = match (&self.oracle.registry, &self.oracle.command) {
            (Some(_), None) => {
                let p = self.registry_entry()?.expect("registry binding checked");
                if (p.n, p.m, p.family) != (self.n, self.m, self.h) {
                    return Err(ConfigError::Invalid(format!(
                        "registry problem {} is {} with n = {}, m = {}",
                        p.name, p.family, p.n, p.m
                    )));
                }
                p.oracle()
            }
            (None, Some(cmd)) => BlackBoxOracle::spawn_external_with_timeout(cmd, self.n, self.m, timeout_from_env())?,
            _ => return Err(ConfigError::Invalid("oracle needs exactly one of registry or command".into())),
        };
        let h = OuterFunction::new(self.h, self.m);
        Ok(Problem::new(self.name.clone(), h, self.region()?, self.start_point()?, oracle)?)
    }
}

/// Norm choice of a named solver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormChoice {
    Fixed(PNorm),
    /// p = 1 if √m < n, otherwise p = ∞.
    Auto,
}

impl NormChoice {
    pub fn resolve(self, n: usize, m: usize) -> PNorm {
        match self {
            NormChoice::Fixed(p) => p,
            NormChoice::Auto => TrfdParams::minimax_norm(n, m),
        }
    }
}

impl fmt::Display for NormChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormChoice::Fixed(p) => write!(f, "{p}"),
            NormChoice::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for NormChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(NormChoice::Auto)
        } else {
            s.parse().map(NormChoice::Fixed)
        }
    }
}

impl Serialize for NormChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub name: String,
    pub norm: NormChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_eta: Option<f64>,
}

impl SolverConfig {
    pub fn new(name: impl Into<String>, norm: NormChoice) -> Self {
        SolverConfig {
            name: name.into(),
            norm,
            epsilon: None,
            alpha: None,
            theta: None,
            sigma: None,
            delta0: None,
            delta_star: None,
            stop_delta: None,
            stop_eta: None,
        }
    }

    /// TRFD-L1: p = 1.
    pub fn trfd_l1() -> Self {
        Self::new("TRFD-L1", NormChoice::Fixed(PNorm::One))
    }

    /// TRFD-M: p chosen from (n, m).
    pub fn trfd_m() -> Self {
        Self::new("TRFD-M", NormChoice::Auto)
    }

    pub fn params(&self, n: usize, m: usize, budget: EvalBudget) -> TrfdParams {
        let mut p = TrfdParams::with_norm(self.norm.resolve(n, m));
        p.budget = budget;
        if let Some(v) = self.epsilon {
            p.epsilon = v;
        }
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.theta {
            p.theta = v;
        }
        if let Some(v) = self.sigma {
            p.sigma = SigmaRule::Fixed(v);
        }
        if let Some(v) = self.delta0 {
            p.delta0 = Delta0Rule::Fixed(v);
        }
        if let Some(v) = self.delta_star {
            p.delta_star = v;
        }
        if let Some(v) = self.stop_delta {
            p.stop_delta = v;
        }
        if let Some(v) = self.stop_eta {
            p.stop_eta = v;
        }
        p
    }
}

pub const DEFAULT_TOLERANCES: [f64; 4] = [1e-1, 1e-3, 1e-5, 1e-7];

fn default_budget() -> u64 {
    EvalBudget::default().simplex_gradients
}

fn default_tolerances() -> Vec<f64> {
    DEFAULT_TOLERANCES.to_vec()
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub problems: Vec<String>,
    #[serde(default)]
    pub problem_files: Vec<PathBuf>,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_tolerances")]
    pub tolerances: Vec<f64>,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(rename = "solver")]
    pub solvers: Vec<SolverConfig>,
}

impl CampaignConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Loads a campaign; relative problem file paths are resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let mut c = Self::from_toml_str(&read(path)?)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for f in &mut c.problem_files {
            if f.is_relative() {
                *f = dir.join(&*f);
            }
        }
        Ok(c)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("campaign configs always serialize")
    }

    /// Registry entries selected by `problems`, in registry order, without duplicates.
    pub fn registry_selection(&self) -> Result<Vec<BenchmarkProblem>, ConfigError> {
        let all = testset::registry();
        let mut keep = vec![false; all.len()];
        for sel in &self.problems {
            let hits: Vec<usize> = match sel.as_str() {
                "all" => (0..all.len()).collect(),
                "l1" => (0..all.len()).filter(|&i| all[i].family == OuterKind::L1).collect(),
                "minimax" => (0..all.len()).filter(|&i| all[i].family == OuterKind::Minimax).collect(),
                name => match all.iter().position(|p| p.name == name) {
                    Some(i) => vec![i],
                    None => return Err(ConfigError::Invalid(format!("unknown registry problem {name:?}"))),
                },
            };
            for i in hits {
                keep[i] = true;
            }
        }
        Ok(all.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.solvers.is_empty() {
            return Err(ConfigError::Invalid("at least one [[solver]] is required".into()));
        }
        if self.problems.is_empty() && self.problem_files.is_empty() {
            return Err(ConfigError::Invalid("no problems selected".into()));
        }
        if self.budget == 0 {
            return Err(ConfigError::Invalid("budget must be positive".into()));
        }
        if self.tolerances.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(ConfigError::Invalid("tolerances must lie in (0, 1)".into()));
        }
        let mut names: Vec<&str> = self.solvers.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(ConfigError::Invalid("solver names must be unique".into()));
        }
        if names.iter().any(|n| n.is_empty() || n.contains(['/', '\\']) || n.contains("__")) {
            return Err(ConfigError::Invalid("solver names must be nonempty and free of '/', '\\' and '__'".into()));
        }
        Ok(())
    }
}

use super::params::ResolvedParams;
use crate::outer::OuterKind;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IterationClass {
    /// η ≥ ε/2 and ρ ≥ α.
    Success,
    /// η < ε/2: halve τ, keep x and Δ.
    U1,
    /// ρ < α and the halved radius still admits τ: reuse the model.
    U2,
    /// ρ < α and the halved radius forces τ to halve as well.
    U3,
}

impl fmt::Display for IterationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IterationClass::Success => "S",
            IterationClass::U1 => "U1",
            IterationClass::U2 => "U2",
            IterationClass::U3 => "U3",
        })
    }
}

/// Where an iteration entered the algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Entry {
    /// Fresh Jacobian model and η at Δ*.
    Step1,
    /// Re-entry after a U2 iteration with the previous model.
    Step3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    BudgetExhausted,
    DeltaFloor,
    EtaFloor,
    OracleError,
    NumericalTrouble,
}

impl Termination {
    pub fn is_failure(&self) -> bool {
        matches!(self, Termination::OracleError | Termination::NumericalTrouble)
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationSnapshot {
    pub k: usize,
    pub class: IterationClass,
    pub entry: Entry,
    /// τ_k and Δ_k at the start of the iteration.
    pub tau: f64,
    pub delta: f64,
    /// η_{p,Δ*}(x_k; A_k); inherited from the last Step-1 entry on re-entries.
    pub eta_star: f64,
    /// h(F(x_k)) − h(F(x_k) + A_k d_k); absent on U1 iterations.
    pub model_decrease: Option<f64>,
    /// Absent on U1 iterations and when the predicted decrease is degenerate.
    pub rho: Option<f64>,
    /// h(F(x_k))
    pub f: f64,
    /// Cumulative evaluations at the end of the iteration.
    pub evals: u64,
    /// Index into [`RunRecord::iterates`] of x_k.
    pub iterate: usize,
    /// Sequence number of the Jacobian model A_k.
    pub jacobian: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub solver: String,
    pub problem: String,
    pub n: usize,
    pub m: usize,
    pub outer: OuterKind,
    pub params: ResolvedParams,
    pub iterations: Vec<IterationSnapshot>,
    /// x₀ followed by every accepted point.
    pub iterates: Vec<Vec<f64>>,
    /// Best f seen after each single evaluation of F, probes included.
    pub best_f: Vec<f64>,
    /// Evaluations spent after the last completed iteration.
    pub trailing_evals: u64,
    pub total_evals: u64,
    pub termination: Termination,
    pub message: Option<String>,
    pub final_x: Vec<f64>,
    /// Absent when F(x₀) itself could not be evaluated.
    pub final_f: Option<f64>,
    pub final_tau: f64,
    pub final_delta: f64,
}

impl RunRecord {
    pub fn f0(&self) -> Option<f64> {
        self.best_f.first().copied()
    }

    pub fn count(&self, class: IterationClass) -> usize {
        self.iterations.iter().filter(|s| s.class == class).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run records always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)
    }

    pub fn read(path: &Path) -> io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

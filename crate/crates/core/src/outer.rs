//! Known convex outer functions `h: ℝᵐ → ℝ`.

use crate::norms::PNorm;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Structural tag of `h`; the subproblem layer relies on it to build a linear program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OuterKind {
    /// `h(z) = Σ |z_i|`
    L1,
    /// `h(z) = max_i z_i`
    Minimax,
}

impl fmt::Display for OuterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OuterKind::L1 => "l1",
            OuterKind::Minimax => "minimax",
        })
    }
}

impl FromStr for OuterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(OuterKind::L1),
            "minimax" | "max" => Ok(OuterKind::Minimax),
            other => Err(format!("unknown outer function `{other}` (expected l1 or minimax)")),
        }
    }
}

/// An outer function on ℝᵐ together with its Lipschitz constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterFunction {
    pub kind: OuterKind,
    pub m: usize,
}

impl OuterFunction {
    pub fn new(kind: OuterKind, m: usize) -> Self {
        assert!(m >= 1, "outer function needs at least one component");
        OuterFunction { kind, m }
    }

    pub fn l1(m: usize) -> Self {
        Self::new(OuterKind::L1, m)
    }

    pub fn minimax(m: usize) -> Self {
        Self::new(OuterKind::Minimax, m)
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.m);
        eval_h(self.kind, z)
    }

    /// `L_{h,p}`: for the 1-norm sum it is 1, √m and m for p = 1, 2, ∞;
    /// the maximum is 1-Lipschitz in every p-norm.
    pub fn lipschitz(&self, p: PNorm) -> f64 {
        match (self.kind, p) {
            (OuterKind::L1, PNorm::One) => 1.0,
            (OuterKind::L1, PNorm::Two) => (self.m as f64).sqrt(),
            (OuterKind::L1, PNorm::Infinity) => self.m as f64,
            (OuterKind::Minimax, _) => 1.0,
        }
    }

    /// Whether `u ≤ v` componentwise implies `h(u) ≤ h(v)`.
    pub fn monotone(&self) -> bool {
        matches!(self.kind, OuterKind::Minimax)
    }
}

pub fn eval_h(kind: OuterKind, z: &[f64]) -> f64 {
    match kind {
        OuterKind::L1 => z.iter().map(|v| v.abs()).sum(),
        OuterKind::Minimax => z.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

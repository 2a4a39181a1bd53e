//! Problem description: feasible polyhedron, start point, outer function, oracle.

use crate::oracle::BlackBoxOracle;
use crate::outer::OuterFunction;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when checking that a point lies in a [`FeasibleRegion`].
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("lower bound exceeds upper bound at coordinate {0}")]
    InvertedBounds(usize),
    #[error("start point is not feasible: {0}")]
    InfeasibleStart(String),
}

/// `a · x ≤ b`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearInequality {
    pub a: Vec<f64>,
    pub b: f64,
}

/// Box bounds (possibly infinite) plus optional linear inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default)]
    pub inequalities: Vec<LinearInequality>,
}

impl FeasibleRegion {
    pub fn unconstrained(n: usize) -> Self {
        FeasibleRegion {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
            inequalities: Vec::new(),
        }
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ProblemError> {
        let region = FeasibleRegion {
            lower,
            upper,
            inequalities: Vec::new(),
        };
        region.validate()?;
        Ok(region)
    }

    pub fn with_inequality(mut self, a: Vec<f64>, b: f64) -> Result<Self, ProblemError> {
        if a.len() != self.dim() {
            return Err(ProblemError::Dimension(format!(
                "inequality row has length {}, expected {}",
                a.len(),
                self.dim()
            )));
        }
        self.inequalities.push(LinearInequality { a, b });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn is_unconstrained(&self) -> bool {
        self.inequalities.is_empty()
            && self.lower.iter().all(|l| *l == f64::NEG_INFINITY)
            && self.upper.iter().all(|u| *u == f64::INFINITY)
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        if self.lower.len() != self.upper.len() {
            return Err(ProblemError::Dimension(format!(
                "{} lower bounds but {} upper bounds",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if let Some(j) = (0..self.dim()).find(|&j| !(self.lower[j] <= self.upper[j])) {
            return Err(ProblemError::InvertedBounds(j));
        }
        if let Some(row) = self.inequalities.iter().find(|r| r.a.len() != self.dim()) {
            return Err(ProblemError::Dimension(format!(
                "inequality row has length {}, expected {}",
                row.a.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Largest constraint violation at `x` (0 when feasible).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for row in &self.inequalities {
            let ax: f64 = row.a.iter().zip(x).map(|(a, v)| a * v).sum();
            worst = worst.max(ax - row.b);
        }
        worst
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim() && self.violation(x) <= tol
    }
}

/// `minimize h(F(x))` over a feasible region, starting from `x0`.
#[derive(Debug)]
pub struct Problem {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub h: OuterFunction,
    pub region: FeasibleRegion,
    pub x0: Vec<f64>,
    pub oracle: BlackBoxOracle,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        h: OuterFunction,
        region: FeasibleRegion,
        x0: Vec<f64>,
        oracle: BlackBoxOracle,
    ) -> Result<Self, ProblemError> {
        use crate::oracle::Evaluate;
        let n = oracle.n();
        let m = oracle.m();
        if n == 0 || m == 0 {
            return Err(ProblemError::Dimension("n and m must be positive".into()));
        }
        if h.m != m {
            return Err(ProblemError::Dimension(format!(
                "outer function expects {} components, oracle yields {m}",
                h.m
            )));
        }
        if x0.len() != n || region.dim() != n {
            return Err(ProblemError::Dimension(format!(
                "start has length {}, region dimension {}, oracle expects {n}",
                x0.len(),
                region.dim()
            )));
        }
        region.validate()?;
        if !region.contains(&x0, FEASIBILITY_TOL) {
            return Err(ProblemError::InfeasibleStart(format!(
                "violation {:e}",
                region.violation(&x0)
            )));
        }
        Ok(Problem {
            name: name.into(),
            n,
            m,
            h,
            region,
            x0,
            oracle,
        })
    }
}

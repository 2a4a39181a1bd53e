use crate::norms::{norm_constants, NormConstants, PNorm, MACHINE_EPS};
use crate::outer::OuterFunction;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("p = {0} is not supported by the linear-programming subproblem solver")]
    UnsupportedNorm(PNorm),
}

/// Evaluation allowance measured in simplex gradients of `n + 1` evaluations each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalBudget {
    pub simplex_gradients: u64,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            simplex_gradients: 100,
        }
    }
}

impl EvalBudget {
    pub fn new(simplex_gradients: u64) -> Self {
        EvalBudget { simplex_gradients }
    }

    pub fn max_evaluations(&self, n: usize) -> u64 {
        self.simplex_gradients * (n as u64 + 1)
    }
}

/// How σ is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaRule {
    /// σ = ε / (L_{h,p} c_{p,2}(m) c_{2,p}(n) √n √eps), which makes τ₀ = √eps.
    SqrtEpsStep,
    Fixed(f64),
}

/// How the initial radius Δ₀ is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delta0Rule {
    /// Δ₀ = max{1, τ₀√n}
    MaxOneOrStep,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrfdParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub theta: f64,
    pub sigma: SigmaRule,
    pub delta0: Delta0Rule,
    pub delta_star: f64,
    pub p: PNorm,
    pub budget: EvalBudget,
    pub stop_delta: f64,
    pub stop_eta: f64,
    /// Write every subproblem LP in MPS format into this directory.
    #[serde(skip)]
    pub lp_dump_dir: Option<PathBuf>,
}

impl Default for TrfdParams {
    fn default() -> Self {
        Self::with_norm(PNorm::One)
    }
}

impl TrfdParams {
    /// ε = 10⁻¹⁵, α = 0.15, θ = 1, Δ* = 1000, stopping floors 10⁻¹³, 100 simplex gradients.
    pub fn with_norm(p: PNorm) -> Self {
        TrfdParams {
            epsilon: 1e-15,
            alpha: 0.15,
            theta: 1.0,
            sigma: SigmaRule::SqrtEpsStep,
            delta0: Delta0Rule::MaxOneOrStep,
            delta_star: 1000.0,
            p,
            budget: EvalBudget::default(),
            stop_delta: 1e-13,
            stop_eta: 1e-13,
            lp_dump_dir: None,
        }
    }

    /// p = 1 when √m < n, otherwise p = ∞.
    pub fn minimax_norm(n: usize, m: usize) -> PNorm {
        if (m as f64).sqrt() < n as f64 {
            PNorm::One
        } else {
            PNorm::Infinity
        }
    }

    /// Fixes every problem-dependent constant and checks the parameter invariants.
    pub fn resolve(&self, n: usize, m: usize, h: &OuterFunction) -> Result<ResolvedParams, ParamError> {
        let bad = |msg: String| Err(ParamError::Invalid(msg));
        if self.p == PNorm::Two {
            return Err(ParamError::UnsupportedNorm(self.p));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return bad(format!("theta must lie in (0, 1], got {}", self.theta));
        }
        if self.budget.simplex_gradients == 0 {
            return bad("budget must allow at least one simplex gradient".into());
        }
        if !(self.stop_delta >= 0.0 && self.stop_eta >= 0.0) {
            return bad("stopping floors must be nonnegative".into());
        }
        let consts = norm_constants(self.p, n, m);
        let lipschitz_h = h.lipschitz(self.p);
        let sqrt_n = (n as f64).sqrt();
        let sigma = match self.sigma {
            SigmaRule::SqrtEpsStep => {
                self.epsilon / (lipschitz_h * consts.cp2_m * consts.c2p_n * sqrt_n * MACHINE_EPS.sqrt())
            }
            SigmaRule::Fixed(s) => s,
        };
        if !(sigma > 0.0) || !sigma.is_finite() {
            return bad(format!("sigma must be positive, got {sigma}"));
        }
        let tau0 = self.epsilon / (lipschitz_h * sigma * consts.cp2_m * consts.c2p_n * sqrt_n);
        let delta0 = match self.delta0 {
            Delta0Rule::MaxOneOrStep => (tau0 * sqrt_n).max(1.0),
            Delta0Rule::Fixed(d) => d,
        };
        if !(tau0 * sqrt_n <= delta0 && delta0 <= self.delta_star) {
            return bad(format!(
                "need τ₀√n ≤ Δ₀ ≤ Δ*, got {:e} ≤ {delta0:e} ≤ {:e}",
                tau0 * sqrt_n,
                self.delta_star
            ));
        }
        Ok(ResolvedParams {
            epsilon: self.epsilon,
            alpha: self.alpha,
            theta: self.theta,
            sigma,
            tau0,
            delta0,
            delta_star: self.delta_star,
            p: self.p,
            lipschitz_h,
            consts,
            stop_delta: self.stop_delta,
            stop_eta: self.stop_eta,
            simplex_gradients: self.budget.simplex_gradients,
            max_evals: self.budget.max_evaluations(n),
        })
    }
}

/// Parameters with every problem-dependent constant filled in; echoed into each run record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub theta: f64,
    pub sigma: f64,
    pub tau0: f64,
    pub delta0: f64,
    pub delta_star: f64,
    pub p: PNorm,
    pub lipschitz_h: f64,
    pub consts: NormConstants,
    pub stop_delta: f64,
    pub stop_eta: f64,
    pub simplex_gradients: u64,
    pub max_evals: u64,
}

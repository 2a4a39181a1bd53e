//! Forward-difference Jacobian models.

use crate::oracle::{Evaluate, OracleError};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FdError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("stepsize {tau:e} does not move coordinate {coord} of x")]
    DegenerateStep { tau: f64, coord: usize },
    #[error("stepsize must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// `A` with columns `(F(x + τ eⱼ) − F(x)) / τ`, plus the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianModel {
    pub a: DMatrix<f64>,
    pub tau: f64,
    pub base_x: Vec<f64>,
    pub base_f: Vec<f64>,
}

/// `true` when `x + τ eⱼ` differs from `x` in every coordinate `j`.
pub fn step_resolves(x: &[f64], tau: f64) -> Result<(), FdError> {
    match x.iter().position(|&xj| xj + tau == xj) {
        Some(coord) => Err(FdError::DegenerateStep { tau, coord }),
        None => Ok(()),
    }
}

/// Builds the model from exactly `n` fresh evaluations; `f_x` must equal `F(x)`.
///
/// No evaluation is made unless every probe point is distinct from `x`.
pub fn build_jacobian<O: Evaluate + ?Sized>(
    oracle: &mut O,
    x: &[f64],
    f_x: &[f64],
    tau: f64,
) -> Result<JacobianModel, FdError> {
    let (n, m) = (oracle.n(), oracle.m());
    if x.len() != n || f_x.len() != m {
        return Err(FdError::Dimension(format!(
            "x has {} entries and F(x) {}, oracle is {n} -> {m}",
            x.len(),
            f_x.len()
        )));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(FdError::BadStep(tau));
    }
    step_resolves(x, tau)?;

    let mut a = DMatrix::zeros(m, n);
    let mut probe = x.to_vec();
    for j in 0..n {
        probe[j] = x[j] + tau;
        let f_probe = oracle.eval_f(&probe)?;
        for i in 0..m {
            a[(i, j)] = (f_probe[i] - f_x[i]) / tau;
        }
        probe[j] = x[j];
    }
    Ok(JacobianModel {
        a,
        tau,
        base_x: x.to_vec(),
        base_f: f_x.to_vec(),
    })
}

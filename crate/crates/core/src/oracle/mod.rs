//! Evaluation-counted access to the black-box mapping `F: ℝⁿ → ℝᵐ`.
//!
//! Two backends exist: a closure living in this process, and a child process
//! speaking the line-oriented JSON protocol in [`wire`].

mod external;
pub mod wire;

pub use external::{timeout_from_env, ExternalProcess, DEFAULT_TIMEOUT, TIMEOUT_ENV};

use std::fmt;
use std::sync::Arc;
use std::time::Duration;
use thiserror::Error;

/// Residual mapping shared between threads.
pub type ResidualFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("failed to spawn oracle process: {0}")]
    SpawnFailure(String),
    #[error("oracle did not complete the handshake within {0:?}")]
    HandshakeTimeout(Duration),
    #[error("oracle failure: {0}")]
    Failure(String),
}

/// Anything that can evaluate `F` and count it.
///
/// The driver wraps a [`BlackBoxOracle`] in its own implementation to trace
/// every evaluation; the finite-difference builder only sees this trait.
pub trait Evaluate {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn eval_f(&mut self, x: &[f64]) -> Result<Vec<f64>, OracleError>;
}

pub enum Backend {
    InProcess(ResidualFn),
    External(ExternalProcess),
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::InProcess(_) => f.write_str("InProcess(..)"),
            Backend::External(p) => f.debug_tuple("External").field(p).finish(),
        }
    }
}

#[derive(Debug)]
pub struct BlackBoxOracle {
    backend: Backend,
    n: usize,
    m: usize,
    eval_count: u64,
}

impl BlackBoxOracle {
    pub fn in_process<F>(n: usize, m: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::from_fn(n, m, Arc::new(f))
    }

    pub fn from_fn(n: usize, m: usize, f: ResidualFn) -> Self {
        BlackBoxOracle {
            backend: Backend::InProcess(f),
            n,
            m,
            eval_count: 0,
        }
    }

    /// Launches `command` (whitespace-separated program and arguments) and
    /// performs the handshake. The per-call timeout comes from
    /// `TRFD_ORACLE_TIMEOUT_SECS`, defaulting to 60 s.
    pub fn spawn_external(command: &str, n: usize, m: usize) -> Result<Self, OracleError> {
        Self::spawn_external_with_timeout(command, n, m, timeout_from_env())
    }

    pub fn spawn_external_with_timeout(
        command: &str,
        n: usize,
        m: usize,
        timeout: Duration,
    ) -> Result<Self, OracleError> {
        let process = ExternalProcess::spawn(command, n, m, timeout)?;
        Ok(BlackBoxOracle {
            backend: Backend::External(process),
            n,
            m,
            eval_count: 0,
        })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn eval_count(&self) -> u64 {
        self.eval_count
    }

    /// Evaluates `F(x)`. Every call counts, including failed ones; results are not cached.
    pub fn eval(&mut self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        self.eval_count += 1;
        if x.len() != self.n {
            return Err(OracleError::Failure(format!(
                "query has length {}, expected {}",
                x.len(),
                self.n
            )));
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(OracleError::Failure(format!("non-finite query component {v}")));
        }
        let fvec = match &mut self.backend {
            Backend::InProcess(f) => f(x),
            Backend::External(p) => p.query(x)?,
        };
        check_output(&fvec, self.m)?;
        Ok(fvec)
    }
}

impl Evaluate for BlackBoxOracle {
    fn n(&self) -> usize {
        self.n
    }

    fn m(&self) -> usize {
        self.m
    }

    fn eval_f(&mut self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        self.eval(x)
    }
}

fn check_output(fvec: &[f64], m: usize) -> Result<(), OracleError> {
    if fvec.len() != m {
        return Err(OracleError::Failure(format!(
            "oracle returned {} components, expected {m}",
            fvec.len()
        )));
    }
    if let Some((i, v)) = fvec.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(OracleError::Failure(format!("component {i} is not finite ({v})")));
    }
    Ok(())
}

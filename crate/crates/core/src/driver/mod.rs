//! The derivative-free trust-region iteration.
//!
//! Each iteration either starts at Step 1 (a fresh forward-difference model and
//! η at Δ*) or re-enters at Step 3 with the previous model after a U2 iteration.
//! The loop is a small state machine over `(x, τ, Δ, model, entry)`.

pub mod params;
pub mod record;

pub use params::{Delta0Rule, EvalBudget, ParamError, ResolvedParams, SigmaRule, TrfdParams};
pub use record::{Entry, IterationClass, IterationSnapshot, RunRecord, Termination, SCHEMA_VERSION};

use crate::fd::{build_jacobian, FdError, JacobianModel};
use crate::norms::PNorm;
use crate::oracle::{BlackBoxOracle, Evaluate, OracleError};
use crate::outer::OuterFunction;
use crate::problem::{FeasibleRegion, Problem};
use crate::subproblem::{reformulate, solve_reformulated, SubproblemError, SubproblemSolution};
use nalgebra::DMatrix;
use std::path::Path;

/// Predicted decreases at or below `RHO_DEGENERATE_TOL · (1 + |f|)` make ρ undefined.
pub const RHO_DEGENERATE_TOL: f64 = 1e-15;

/// Absolute slack, scaled by `1 + |f|`, in the runtime check of the θ-condition.
pub const THETA_GUARD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    Ratio(f64),
    Degenerate,
}

impl Rho {
    pub fn value(self) -> Option<f64> {
        match self {
            Rho::Ratio(r) => Some(r),
            Rho::Degenerate => None,
        }
    }
}

/// `ρ = (f(x) − f(x + d)) / (f(x) − h(F(x) + A d))`
pub fn compute_rho(f_x: f64, f_trial: f64, model_value: f64) -> Rho {
    let predicted = f_x - model_value;
    if predicted > RHO_DEGENERATE_TOL * (1.0 + f_x.abs()) {
        Rho::Ratio((f_x - f_trial) / predicted)
    } else {
        Rho::Degenerate
    }
}

/// Counts evaluations and keeps the best-so-far value after each one.
struct Tracer<'a> {
    oracle: &'a mut BlackBoxOracle,
    h: &'a OuterFunction,
    start: u64,
    best_f: Vec<f64>,
}

impl Tracer<'_> {
    fn used(&self) -> u64 {
        self.oracle.eval_count() - self.start
    }
}

impl Evaluate for Tracer<'_> {
    fn n(&self) -> usize {
        self.oracle.n()
    }

    fn m(&self) -> usize {
        self.oracle.m()
    }

    fn eval_f(&mut self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        let fvec = self.oracle.eval(x)?;
        let v = self.h.eval(&fvec);
        let best = self.best_f.last().map_or(v, |&b| b.min(v));
        self.best_f.push(best);
        Ok(fvec)
    }
}

struct Subproblems<'a> {
    h: &'a OuterFunction,
    region: &'a FeasibleRegion,
    p: PNorm,
    dump_dir: Option<&'a Path>,
    problem: &'a str,
}

impl Subproblems<'_> {
    fn solve(
        &self,
        f_x: &[f64],
        a: &DMatrix<f64>,
        x: &[f64],
        r: f64,
        tag: &str,
    ) -> Result<SubproblemSolution, SubproblemError> {
        let tr = reformulate(self.h, f_x, a, self.region, x, self.p, r)?;
        if let Some(dir) = self.dump_dir {
            // Dumps are a debugging aid; failing to write one does not stop the run.
            let name = format!("{}_{tag}", self.problem);
            let _ = std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(dir.join(format!("{name}.mps")), tr.lp.to_mps(&name)));
        }
        solve_reformulated(self.h, f_x, a, self.region, x, self.p, &tr)
    }
}

/// Runs the method on `problem` from `problem.x0`.
///
/// Parameter errors are returned before any evaluation; everything that goes
/// wrong afterwards is reported through [`RunRecord::termination`].
pub fn solve(problem: &mut Problem, params: &TrfdParams) -> Result<RunRecord, ParamError> {
    let (n, m) = (problem.n, problem.m);
    let rp = params.resolve(n, m, &problem.h)?;
    let h = problem.h.clone();
    let subs = Subproblems {
        h: &h,
        region: &problem.region,
        p: rp.p,
        dump_dir: params.lp_dump_dir.as_deref(),
        problem: &problem.name,
    };
    let mut tracer = Tracer {
        start: problem.oracle.eval_count(),
        oracle: &mut problem.oracle,
        h: &h,
        best_f: Vec::new(),
    };
    let sqrt_n = (n as f64).sqrt();

    let mut x = problem.x0.clone();
    let mut tau = rp.tau0;
    let mut delta = rp.delta0;
    let mut iterations: Vec<IterationSnapshot> = Vec::new();
    let mut iterates = vec![x.clone()];
    let mut trailing = 0u64;

    let mut fvec = match tracer.eval_f(&x) {
        Ok(v) => v,
        Err(e) => {
            let total = tracer.used();
            return Ok(RunRecord {
                schema_version: SCHEMA_VERSION,
                solver: "TRFD".into(),
                problem: problem.name.clone(),
                n,
                m,
                outer: h.kind,
                params: rp,
                iterations,
                iterates,
                best_f: tracer.best_f,
                trailing_evals: total,
                total_evals: total,
                termination: Termination::OracleError,
                message: Some(e.to_string()),
                final_x: x,
                final_f: None,
                final_tau: tau,
                final_delta: delta,
            });
        }
    };
    let mut f = h.eval(&fvec);

    let mut entry = Entry::Step1;
    let mut model: Option<(JacobianModel, f64)> = None;
    let mut jacobians = 0usize;
    let mut k = 0usize;

    let (termination, message) = loop {
        assert!(tau * sqrt_n <= delta, "τ√n ≤ Δ violated at iteration {k}");
        let before = tracer.used();
        let iterate = iterates.len() - 1;

        if entry == Entry::Step1 {
            if before + n as u64 > rp.max_evals {
                break (Termination::BudgetExhausted, None);
            }
            let jm = match build_jacobian(&mut tracer, &x, &fvec, tau) {
                Ok(jm) => jm,
                Err(FdError::Oracle(e)) => {
                    trailing = tracer.used() - before;
                    break (Termination::OracleError, Some(e.to_string()));
                }
                Err(e) => break (Termination::NumericalTrouble, Some(e.to_string())),
            };
            jacobians += 1;
            let eta = match subs.solve(&fvec, &jm.a, &x, rp.delta_star, &format!("k{k}_eta")) {
                Ok(s) => s.eta,
                Err(e) => {
                    trailing = tracer.used() - before;
                    break (Termination::NumericalTrouble, Some(e.to_string()));
                }
            };
            if eta <= rp.stop_eta {
                trailing = tracer.used() - before;
                break (Termination::EtaFloor, None);
            }
            if eta < rp.epsilon / 2.0 {
                iterations.push(IterationSnapshot {
                    k,
                    class: IterationClass::U1,
                    entry,
                    tau,
                    delta,
                    eta_star: eta,
                    model_decrease: None,
                    rho: None,
                    f,
                    evals: tracer.used(),
                    iterate,
                    jacobian: jacobians,
                });
                tau /= 2.0;
                k += 1;
                continue;
            }
            model = Some((jm, eta));
        }

        let (jm, eta_star) = model.as_ref().expect("Step 3 follows a Step-1 model");
        let sub = match subs.solve(&fvec, &jm.a, &x, delta, &format!("k{k}_step")) {
            Ok(s) => s,
            Err(e) => {
                trailing = tracer.used() - before;
                break (Termination::NumericalTrouble, Some(e.to_string()));
            }
        };
        // d_k = d_k* satisfies the θ-condition with equality; only rounding can break it.
        let decrease = sub.model_decrease(f);
        let slack = THETA_GUARD_TOL * (1.0 + f.abs());
        if !(decrease >= rp.theta * decrease - slack && decrease >= -slack) {
            trailing = tracer.used() - before;
            break (Termination::NumericalTrouble, Some(format!("model decrease {decrease:e} fails the θ-condition")));
        }
        if tracer.used() + 1 > rp.max_evals {
            trailing = tracer.used() - before;
            break (Termination::BudgetExhausted, None);
        }
        let trial: Vec<f64> = x.iter().zip(&sub.d_star).map(|(xi, di)| xi + di).collect();
        let f_trial_vec = match tracer.eval_f(&trial) {
            Ok(v) => v,
            Err(e) => {
                trailing = tracer.used() - before;
                break (Termination::OracleError, Some(e.to_string()));
            }
        };
        let f_trial = h.eval(&f_trial_vec);
        let rho = compute_rho(f, f_trial, sub.model_value);
        let mut snapshot = IterationSnapshot {
            k,
            class: IterationClass::Success,
            entry,
            tau,
            delta,
            eta_star: *eta_star,
            model_decrease: Some(decrease),
            rho: rho.value(),
            f,
            evals: tracer.used(),
            iterate,
            jacobian: jacobians,
        };

        if matches!(rho, Rho::Ratio(r) if r >= rp.alpha) {
            x = trial;
            fvec = f_trial_vec;
            f = f_trial;
            iterates.push(x.clone());
            delta = (2.0 * delta).min(rp.delta_star);
            entry = Entry::Step1;
        } else {
            delta /= 2.0;
            if tau * sqrt_n <= delta {
                snapshot.class = IterationClass::U2;
                entry = Entry::Step3;
            } else {
                snapshot.class = IterationClass::U3;
                tau /= 2.0;
                entry = Entry::Step1;
            }
        }
        iterations.push(snapshot);
        k += 1;
        if delta <= rp.stop_delta {
            break (Termination::DeltaFloor, None);
        }
    };

    let total = tracer.used();
    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        solver: "TRFD".into(),
        problem: problem.name.clone(),
        n,
        m,
        outer: h.kind,
        params: rp,
        iterations,
        iterates,
        best_f: tracer.best_f,
        trailing_evals: trailing,
        total_evals: total,
        termination,
        message,
        final_x: x,
        final_f: Some(f),
        final_tau: tau,
        final_delta: delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::FeasibleRegion;

    fn problem(name: &str, h: OuterFunction, x0: Vec<f64>, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Problem {
        let n = x0.len();
        let oracle = BlackBoxOracle::in_process(n, h.m, f);
        Problem::new(name, h, FeasibleRegion::unconstrained(n), x0, oracle).unwrap()
    }

    fn rosenbrock() -> Problem {
        problem("rosenbrock", OuterFunction::l1(2), vec![-1.2, 1.0], |x| {
            vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]]
        })
    }

    #[test]
    fn rho_examples() {
        assert_eq!(compute_rho(10.0, 8.0, 8.0), Rho::Ratio(1.0));
        assert_eq!(compute_rho(10.0, 10.0, 9.0), Rho::Ratio(0.0));
        assert_eq!(compute_rho(10.0, 11.0, 9.0), Rho::Ratio(-1.0));
        assert_eq!(compute_rho(1.0, 0.5, 1.0), Rho::Degenerate);
        assert_eq!(compute_rho(1.0, 0.5, 1.0 + 1e-14), Rho::Degenerate);
    }

    #[test]
    fn rosenbrock_l1_reaches_optimum() {
        let mut p = rosenbrock();
        let rec = solve(&mut p, &TrfdParams::with_norm(PNorm::One)).unwrap();
        let f = rec.final_f.unwrap();
        assert!(f <= 1e-5, "final f = {f:e}, termination {}", rec.termination);
        assert!(rec.total_evals <= rec.params.max_evals);
        assert_eq!(rec.best_f.len() as u64, rec.total_evals);
        assert_eq!(*rec.best_f.last().unwrap(), f);
    }

    #[test]
    fn minimax_affine_hits_the_floor() {
        let mut p = problem("affine_max", OuterFunction::minimax(3), vec![0.3, -0.2], |x| {
            vec![x[0] + x[1], x[0] - x[1], -x[0]]
        });
        let rec = solve(&mut p, &TrfdParams::with_norm(PNorm::Infinity)).unwrap();
        // max{x1 + x2, x1 − x2, −x1} ≥ 0 with equality only at the origin.
        let f = rec.final_f.unwrap();
        assert!(f.abs() < 1e-8, "final f = {f:e}");
        assert!(!rec.termination.is_failure());
    }

    #[test]
    fn budget_is_never_exceeded() {
        for sg in [1, 2, 3, 7] {
            let mut p = rosenbrock();
            let mut params = TrfdParams::default();
            params.budget = EvalBudget::new(sg);
            let rec = solve(&mut p, &params).unwrap();
            assert!(rec.total_evals <= sg * 3, "{} > {}", rec.total_evals, sg * 3);
            assert_eq!(rec.total_evals, p.oracle.eval_count());
            assert_eq!(rec.termination, Termination::BudgetExhausted);
        }
    }

    #[test]
    fn record_round_trips_and_runs_are_deterministic() {
        let a = solve(&mut rosenbrock(), &TrfdParams::default()).unwrap();
        let b = solve(&mut rosenbrock(), &TrfdParams::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(RunRecord::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn failing_oracle_is_reported() {
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let mut p = problem("flaky", OuterFunction::l1(2), vec![-1.2, 1.0], move |x| {
            if calls.fetch_add(1, std::sync::atomic::Ordering::SeqCst) >= 5 {
                vec![f64::NAN, 0.0]
            } else {
                vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]]
            }
        });
        let rec = solve(&mut p, &TrfdParams::default()).unwrap();
        assert_eq!(rec.termination, Termination::OracleError);
        assert_eq!(rec.total_evals, 6);
        assert_eq!(rec.best_f.len(), 5);
    }

    #[test]
    fn lp_dump_writes_mps_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut params = TrfdParams::default();
        params.budget = EvalBudget::new(2);
        params.lp_dump_dir = Some(dir.path().to_path_buf());
        solve(&mut rosenbrock(), &params).unwrap();
        let dumped = std::fs::read_dir(dir.path()).unwrap().count();
        assert!(dumped >= 2);
        let text = std::fs::read_to_string(dir.path().join("rosenbrock_k0_eta.mps")).unwrap();
        assert!(text.starts_with("NAME"));
    }
}

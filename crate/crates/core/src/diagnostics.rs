//! Reference computations for tests and trace audits.
//!
//! Nothing here is used by the solver itself. The analytic Jacobian and its
//! Lipschitz constant `L_J` only ever appear in this module.

use crate::driver::{Entry, IterationClass, ResolvedParams, RunRecord, Termination};
use crate::fd::build_jacobian;
use crate::norms::{norm, NormConstants, PNorm, MACHINE_EPS};
use crate::oracle::{BlackBoxOracle, ResidualFn};
use crate::outer::OuterFunction;
use crate::problem::{FeasibleRegion, Problem, ProblemError, FEASIBILITY_TOL};
use crate::subproblem::{model_point, solve_tr_subproblem, SubproblemError};
use nalgebra::DMatrix;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type JacobianFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Default lattice spacing of the brute-force η oracle.
pub const GRID_RESOLUTION: f64 = 1e-3;

/// Relative slack applied to every theoretical bound.
pub const BOUND_SAFETY: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("ψ with p = {0} is only available for m = 1 on ℝⁿ")]
    UnsupportedNorm(PNorm),
    #[error("grid search is limited to n ≤ 3, got n = {0}")]
    DimensionTooLarge(usize),
    #[error("grid resolution must be positive, got {0}")]
    BadResolution(f64),
    #[error(transparent)]
    Subproblem(#[from] SubproblemError),
}

/// A problem whose Jacobian is known in closed form, with `L_J` certified on a box.
#[derive(Clone)]
pub struct AnalyticProblem {
    pub name: String,
    pub h: OuterFunction,
    pub region: FeasibleRegion,
    pub x0: Vec<f64>,
    pub residual: ResidualFn,
    pub jacobian: JacobianFn,
    pub lipschitz_j: f64,
    /// Box on which `lipschitz_j` is certified.
    pub lj_lower: Vec<f64>,
    pub lj_upper: Vec<f64>,
    pub f_star: Option<f64>,
    /// Size of the terms summed into each `Fᵢ(x)`, which sets its rounding error; `|Fᵢ(x)|` when absent.
    pub term_magnitude: Option<ResidualFn>,
}

impl fmt::Debug for AnalyticProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticProblem")
            .field("name", &self.name)
            .field("h", &self.h)
            .field("n", &self.n())
            .field("lipschitz_j", &self.lipschitz_j)
            .field("f_star", &self.f_star)
            .finish_non_exhaustive()
    }
}

impl AnalyticProblem {
    pub fn n(&self) -> usize {
        self.x0.len()
    }

    pub fn m(&self) -> usize {
        self.h.m
    }

    pub fn residual_at(&self, x: &[f64]) -> Vec<f64> {
        (self.residual)(x)
    }

    pub fn jacobian_at(&self, x: &[f64]) -> DMatrix<f64> {
        (self.jacobian)(x)
    }

    pub fn f(&self, x: &[f64]) -> f64 {
        self.h.eval(&self.residual_at(x))
    }

    pub fn in_certified_box(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lj_lower.iter().zip(&self.lj_upper))
            .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    /// A fresh uncounted oracle over the same residuals.
    pub fn oracle(&self) -> BlackBoxOracle {
        BlackBoxOracle::from_fn(self.n(), self.m(), self.residual.clone())
    }

    pub fn problem(&self) -> Result<Problem, ProblemError> {
        Problem::new(self.name.clone(), self.h.clone(), self.region.clone(), self.x0.clone(), self.oracle())
    }

    /// Forward-difference model at `x` with stepsize `tau`.
    pub fn fd_jacobian(&self, x: &[f64], tau: f64) -> DMatrix<f64> {
        let mut oracle = self.oracle();
        let f_x = self.residual_at(x);
        build_jacobian(&mut oracle, x, &f_x, tau)
            .expect("residuals of analytic problems are finite")
            .a
    }
}

/// `ψ_{p,r}(x)`, the stationarity measure built on the true Jacobian.
pub fn psi(ap: &AnalyticProblem, x: &[f64], p: PNorm, r: f64) -> Result<f64, DiagnosticsError> {
    let f_x = ap.residual_at(x);
    let j = ap.jacobian_at(x);
    if p == PNorm::Two {
        if ap.m() != 1 || !ap.region.is_unconstrained() {
            return Err(DiagnosticsError::UnsupportedNorm(p));
        }
        // The model is one affine function of s; over the 2-ball its values fill
        // [F − r‖∇F‖, F + r‖∇F‖] and h is convex in one variable.
        let g: Vec<f64> = j.row(0).iter().copied().collect();
        let reach = r * norm(&g, PNorm::Two);
        let (lo, hi) = (f_x[0] - reach, f_x[0] + reach);
        let best = [lo, hi, 0f64.clamp(lo, hi)]
            .iter()
            .map(|&t| ap.h.eval(&[t]))
            .fold(f64::INFINITY, f64::min);
        return Ok(((ap.h.eval(&f_x) - best) / r).max(0.0));
    }
    let sol = solve_tr_subproblem(&ap.h, &f_x, &j, &ap.region, x, p, r)?;
    Ok(sol.eta)
}

fn axis_values(r: f64, resolution: f64) -> Vec<f64> {
    let k = (r / resolution).floor() as i64;
    let mut v: Vec<f64> = (-k..=k).map(|i| i as f64 * resolution).collect();
    if v[0] > -r {
        v.insert(0, -r);
    }
    if *v.last().unwrap() < r {
        v.push(r);
    }
    v
}

/// Grid minimum of `h(F_x + A d)` over feasible `d` with `‖d‖_p ≤ r`, in η form.
///
/// The lattice has spacing `resolution` on every axis and always includes `±r`,
/// so the vertices of the 1- and ∞-balls are sampled.
pub fn eta_bruteforce(
    h: &OuterFunction,
    f_x: &[f64],
    a: &DMatrix<f64>,
    region: &FeasibleRegion,
    x: &[f64],
    p: PNorm,
    r: f64,
    resolution: f64,
) -> Result<f64, DiagnosticsError> {
    let n = a.ncols();
    if n > 3 {
        return Err(DiagnosticsError::DimensionTooLarge(n));
    }
    if !(resolution > 0.0) {
        return Err(DiagnosticsError::BadResolution(resolution));
    }
    let axis = axis_values(r, resolution);
    let base = h.eval(f_x);
    let mut best = base;
    let mut idx = vec![0usize; n];
    let mut d = vec![0.0; n];
    let mut trial = vec![0.0; n];
    'grid: loop {
        for j in 0..n {
            d[j] = axis[idx[j]];
            trial[j] = x[j] + d[j];
        }
        if norm(&d, p) <= r * (1.0 + 1e-12) && region.contains(&trial, FEASIBILITY_TOL) {
            best = best.min(h.eval(&model_point(f_x, a, &d)));
        }
        for j in 0..n {
            idx[j] += 1;
            if idx[j] < axis.len() {
                continue 'grid;
            }
            idx[j] = 0;
        }
        break;
    }
    Ok((base - best) / r)
}

/// `L_J √n τ / 2`, the forward-difference error bound on `‖A − J‖₂`.
pub fn fd_error_bound(lipschitz_j: f64, n: usize, tau: f64) -> f64 {
    lipschitz_j * (n as f64).sqrt() * tau / 2.0
}

/// Ulps of error assumed per residual evaluation.
pub const RESIDUAL_ULPS: f64 = 8.0;

/// Frobenius bound on the floating-point part of `A − J_F(x)`.
///
/// Entry `(i, j)` is allowed `u(γ(|Fᵢ(x)| + |Fᵢ(x + τeⱼ)|) + (|xⱼ| + τ)|Jᵢⱼ|) / τ`
/// with `γ =` [`RESIDUAL_ULPS`]: rounding in both residuals plus the
/// representation error of the step `x + τeⱼ`.
pub fn fd_rounding_bound(ap: &AnalyticProblem, x: &[f64], tau: f64) -> f64 {
    let u = MACHINE_EPS / 2.0;
    let magnitude = |x: &[f64]| match &ap.term_magnitude {
        Some(t) => t(x),
        None => ap.residual_at(x).iter().map(|v| v.abs()).collect(),
    };
    let f_x = magnitude(x);
    let j = ap.jacobian_at(x);
    let mut sum = 0.0;
    let mut probe = x.to_vec();
    for c in 0..x.len() {
        probe[c] = x[c] + tau;
        let f_p = magnitude(&probe);
        probe[c] = x[c];
        for i in 0..f_x.len() {
            let e = u * (RESIDUAL_ULPS * (f_x[i] + f_p[i]) + (x[c].abs() + tau) * j[(i, c)].abs()) / tau;
            sum += e * e;
        }
    }
    sum.sqrt()
}

/// `L_{h,p} c_{p,2}(m) c_{2,p}(n) E`, the change of `|ψ − η|` caused by a model error of spectral size `E`.
pub fn model_error_effect(lipschitz_h: f64, consts: NormConstants, e: f64) -> f64 {
    lipschitz_h * consts.cp2_m * consts.c2p_n * e
}

/// `L_{h,p} L_J c_{p,2}(m) c_{2,p}(n) √n τ / 2`, the bound on `|ψ − η|`.
pub fn psi_eta_bound(lipschitz_h: f64, lipschitz_j: f64, consts: NormConstants, n: usize, tau: f64) -> f64 {
    model_error_effect(lipschitz_h, consts, fd_error_bound(lipschitz_j, n, tau))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCheck {
    pub psi: f64,
    pub eta: f64,
    /// Exact-arithmetic bound.
    pub bound: f64,
    /// Floating-point allowance from [`fd_rounding_bound`].
    pub rounding: f64,
}

impl GapCheck {
    pub fn gap(&self) -> f64 {
        (self.psi - self.eta).abs()
    }

    pub fn holds(&self) -> bool {
        self.gap() <= (self.bound + self.rounding) * (1.0 + BOUND_SAFETY)
    }
}

/// Measures `|ψ_{p,r}(x) − η_{p,r}(x; A)|` for the forward-difference `A` with stepsize `tau`.
pub fn check_psi_eta_gap(
    ap: &AnalyticProblem,
    x: &[f64],
    p: PNorm,
    r: f64,
    tau: f64,
) -> Result<GapCheck, DiagnosticsError> {
    let psi = psi(ap, x, p, r)?;
    let a = ap.fd_jacobian(x, tau);
    let eta = solve_tr_subproblem(&ap.h, &ap.residual_at(x), &a, &ap.region, x, p, r)?.eta;
    let consts = crate::norms::norm_constants(p, ap.n(), ap.m());
    let l_h = ap.h.lipschitz(p);
    let bound = psi_eta_bound(l_h, ap.lipschitz_j, consts, ap.n(), tau);
    let rounding = model_error_effect(l_h, consts, fd_rounding_bound(ap, x, tau));
    Ok(GapCheck { psi, eta, bound, rounding })
}

/// `(1 − α) θ ε / (4 L_{h,p} max{σ, L_J} c_{p,2}(m) c_{2,p}(n)²)`
pub fn delta_min(params: &ResolvedParams, lipschitz_j: f64) -> f64 {
    let c = params.consts;
    (1.0 - params.alpha) * params.theta * params.epsilon
        / (4.0 * params.lipschitz_h * params.sigma.max(lipschitz_j) * c.cp2_m * c.c2p_n * c.c2p_n)
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}: {invariant}", match .iteration { Some(k) => format!("iteration {k}"), None => "record".to_string() })]
pub struct AuditFailure {
    pub iteration: Option<usize>,
    pub invariant: String,
}

fn fail<T>(iteration: Option<usize>, invariant: impl Into<String>) -> Result<T, AuditFailure> {
    Err(AuditFailure {
        iteration,
        invariant: invariant.into(),
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub problem: String,
    pub solver: String,
    pub iterations: usize,
    pub successes: usize,
    pub u1: usize,
    pub u2: usize,
    pub u3: usize,
    pub total_evals: u64,
    /// Iterations whose η was recomputed from the residuals.
    pub eta_rechecked: usize,
    /// Iterations whose `|ψ − η|` gap was measured.
    pub gap_checked: usize,
    /// Gaps within the exact-arithmetic bound alone.
    pub gap_exact_only: usize,
    /// Radii compared against `Δ_min`.
    pub delta_min_checked: usize,
    pub delta_min: Option<f64>,
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "audit {} / {}: ok", self.solver, self.problem)?;
        writeln!(
            f,
            "  iterations {} (S {}, U1 {}, U2 {}, U3 {}), evaluations {}",
            self.iterations, self.successes, self.u1, self.u2, self.u3, self.total_evals
        )?;
        write!(
            f,
            "  eta rechecked {}, psi-eta gaps {} ({} without rounding allowance), delta_min checks {}",
            self.eta_rechecked, self.gap_checked, self.gap_exact_only, self.delta_min_checked
        )?;
        if let Some(dm) = self.delta_min {
            write!(f, " (delta_min {dm:e})")?;
        }
        Ok(())
    }
}

/// Expected `(τ, Δ, entry)` after an iteration of the given class.
fn successor(class: IterationClass, tau: f64, delta: f64, delta_star: f64) -> (f64, f64, Entry) {
    match class {
        IterationClass::U1 => (tau / 2.0, delta, Entry::Step1),
        IterationClass::Success => (tau, (2.0 * delta).min(delta_star), Entry::Step1),
        IterationClass::U2 => (tau, delta / 2.0, Entry::Step3),
        IterationClass::U3 => (tau / 2.0, delta / 2.0, Entry::Step1),
    }
}

/// Re-derives every iteration of `record` and checks the driver invariants.
///
/// With an analytic problem the audit also rebuilds each model from the
/// residuals, checks η monotonicity in the radius, the `|ψ − η|` bound, and
/// `Δ_k ≥ Δ_min(ε)` along the prefix where `ψ_{p,Δ*}(x_k) > ε`.
pub fn audit_trace(record: &RunRecord, analytic: Option<&AnalyticProblem>) -> Result<AuditReport, AuditFailure> {
    let rp = &record.params;
    let n = record.n;
    let sqrt_n = (n as f64).sqrt();
    let full_pass = n as u64 + 1;

    if record.iterates.is_empty() {
        return fail(None, "no starting point recorded");
    }
    if record.total_evals > rp.max_evals {
        return fail(None, format!("{} evaluations exceed the budget {}", record.total_evals, rp.max_evals));
    }
    if record.termination != Termination::OracleError && record.best_f.len() as u64 != record.total_evals {
        return fail(
            None,
            format!("{} best-f entries for {} evaluations", record.best_f.len(), record.total_evals),
        );
    }
    if record.best_f.windows(2).any(|w| w[1] > w[0]) {
        return fail(None, "best-f trajectory increases");
    }

    let mut tau = rp.tau0;
    let mut delta = rp.delta0;
    let mut entry = Entry::Step1;
    let mut iterate = 0usize;
    let mut jacobian = 0usize;
    let mut evals = u64::from(record.total_evals > 0);
    let mut f_prev = f64::INFINITY;
    let mut eta_prev = f64::NAN;

    for (k, s) in record.iterations.iter().enumerate() {
        let at = Some(k);
        if s.k != k {
            return fail(at, format!("snapshot numbered {}", s.k));
        }
        if s.tau != tau {
            return fail(at, format!("τ_k = {:e} but the replay gives {tau:e}", s.tau));
        }
        if s.delta != delta {
            return fail(at, format!("Δ_k = {:e} but the replay gives {delta:e}", s.delta));
        }
        if s.entry != entry {
            return fail(at, format!("entered at {:?} but the replay gives {entry:?}", s.entry));
        }
        if s.iterate != iterate || iterate >= record.iterates.len() {
            return fail(at, format!("iterate index {} but the replay gives {iterate}", s.iterate));
        }
        if !(s.tau * sqrt_n <= s.delta) {
            return fail(at, "τ_k √n ≤ Δ_k violated");
        }
        if !(s.eta_star >= 0.0) {
            return fail(at, format!("η = {} is negative", s.eta_star));
        }
        if s.f > f_prev {
            return fail(at, "f(x_k) increased");
        }
        f_prev = s.f;

        let expected_jacobian = if entry == Entry::Step1 { jacobian + 1 } else { jacobian };
        if s.jacobian != expected_jacobian {
            return fail(at, format!("model {} but the replay gives {expected_jacobian}", s.jacobian));
        }
        jacobian = expected_jacobian;
        if entry == Entry::Step3 && s.eta_star != eta_prev {
            return fail(at, "η changed without a new model");
        }
        eta_prev = s.eta_star;

        let class = if entry == Entry::Step1 && s.eta_star < rp.epsilon / 2.0 {
            IterationClass::U1
        } else {
            match s.rho {
                Some(r) if r >= rp.alpha => IterationClass::Success,
                _ if tau * sqrt_n <= delta / 2.0 => IterationClass::U2,
                _ => IterationClass::U3,
            }
        };
        if s.class != class {
            return fail(at, format!("recorded {} but the data imply {class}", s.class));
        }
        if class == IterationClass::U1 {
            if s.rho.is_some() || s.model_decrease.is_some() {
                return fail(at, "U1 iteration carries a trial step");
            }
        } else {
            match s.model_decrease {
                Some(dm) if dm >= 0.0 => {}
                _ => return fail(at, "model decrease missing or negative"),
            }
        }

        let cost = match (entry, class) {
            (Entry::Step1, IterationClass::U1) => n as u64,
            (Entry::Step1, _) => full_pass,
            (Entry::Step3, _) => 1,
        };
        if s.evals != evals + cost {
            return fail(at, format!("cost {} but {entry:?}/{class} costs {cost}", s.evals - evals.min(s.evals)));
        }
        evals = s.evals;

        (tau, delta, entry) = successor(class, tau, delta, rp.delta_star);
        if class == IterationClass::Success {
            iterate += 1;
        }
    }

    if record.final_tau != tau || record.final_delta != delta {
        return fail(None, "final τ or Δ does not follow from the last iteration");
    }
    if iterate + 1 != record.iterates.len() {
        return fail(None, format!("{} iterates recorded, {} accepted steps replayed", record.iterates.len(), iterate));
    }
    if record.final_x != record.iterates[iterate] {
        return fail(None, "final x is not the last accepted iterate");
    }
    if record.termination != Termination::OracleError && evals + record.trailing_evals != record.total_evals {
        return fail(None, "evaluation counts do not add up");
    }
    let passes = record.iterations.len() as u64 + u64::from(record.trailing_evals > 0);
    if record.total_evals > full_pass * passes + 1 {
        return fail(None, "more evaluations than (n + 1) per iteration");
    }
    match record.termination {
        Termination::DeltaFloor if !(delta <= rp.stop_delta) => return fail(None, "DeltaFloor above the floor"),
        Termination::BudgetExhausted => {
            let next = if entry == Entry::Step1 { n as u64 } else { 1 };
            if record.total_evals + next <= rp.max_evals && record.trailing_evals == 0 {
                return fail(None, "BudgetExhausted with budget to spare");
            }
        }
        _ => {}
    }

    let mut report = AuditReport {
        problem: record.problem.clone(),
        solver: record.solver.clone(),
        iterations: record.iterations.len(),
        successes: record.count(IterationClass::Success),
        u1: record.count(IterationClass::U1),
        u2: record.count(IterationClass::U2),
        u3: record.count(IterationClass::U3),
        total_evals: record.total_evals,
        ..AuditReport::default()
    };
    if let Some(ap) = analytic {
        audit_against_analytic(record, ap, &mut report)?;
    }
    Ok(report)
}

fn audit_against_analytic(record: &RunRecord, ap: &AnalyticProblem, report: &mut AuditReport) -> Result<(), AuditFailure> {
    let rp = &record.params;
    if ap.n() != record.n || ap.m() != record.m || ap.h.kind != record.outer {
        return fail(None, "analytic problem does not match the record");
    }
    let lipschitz_j = ap.lipschitz_j;
    let dmin = delta_min(rp, lipschitz_j);
    report.delta_min = Some(dmin);

    let mut model: Option<DMatrix<f64>> = None;
    // Δ_k ≥ Δ_min holds for k ≤ T when ψ(x_j) > ε for every j < T.
    let mut certified = true;
    for (k, s) in record.iterations.iter().enumerate() {
        let at = Some(k);
        let x = &record.iterates[s.iterate];
        let f_x = ap.residual_at(x);
        if certified && !(s.delta >= dmin) {
            return fail(at, format!("Δ_k = {:e} below Δ_min = {dmin:e}", s.delta));
        }
        report.delta_min_checked += usize::from(certified);

        if s.entry == Entry::Step1 {
            let a = ap.fd_jacobian(x, s.tau);
            let sub = |r| {
                solve_tr_subproblem(&ap.h, &f_x, &a, &ap.region, x, rp.p, r)
                    .map_err(|e| AuditFailure { iteration: at, invariant: e.to_string() })
            };
            let eta_star = sub(rp.delta_star)?.eta;
            let tol = 1e-9 * (1.0 + eta_star.abs());
            if (eta_star - s.eta_star).abs() > tol {
                return fail(at, format!("recomputed η = {eta_star:e}, recorded {:e}", s.eta_star));
            }
            let eta_k = sub(s.delta)?.eta;
            if eta_k < eta_star - tol {
                return fail(at, format!("η(Δ_k) = {eta_k:e} < η(Δ*) = {eta_star:e}"));
            }
            report.eta_rechecked += 1;
            model = Some(a);

            let in_box = ap.in_certified_box(x);
            let psi_star = psi(ap, x, rp.p, rp.delta_star).map_err(|e| AuditFailure {
                iteration: at,
                invariant: e.to_string(),
            })?;
            if in_box {
                let check = GapCheck {
                    psi: psi_star,
                    eta: eta_star,
                    bound: psi_eta_bound(rp.lipschitz_h, lipschitz_j, rp.consts, record.n, s.tau),
                    rounding: model_error_effect(rp.lipschitz_h, rp.consts, fd_rounding_bound(ap, x, s.tau)),
                };
                if !check.holds() {
                    return fail(
                        at,
                        format!(
                            "|ψ − η| = {:e} exceeds {:e} + rounding {:e}",
                            check.gap(),
                            check.bound,
                            check.rounding
                        ),
                    );
                }
                report.gap_exact_only += usize::from(check.gap() <= check.bound * (1.0 + BOUND_SAFETY));
                report.gap_checked += 1;
            }
            certified = certified && in_box && psi_star > rp.epsilon;
        } else if model.is_none() {
            return fail(at, "Step-3 entry without a model");
        } else {
            // x_k is unchanged from the last Step-1 entry, so ψ is too.
            let psi_star = psi(ap, x, rp.p, rp.delta_star).map_err(|e| AuditFailure {
                iteration: at,
                invariant: e.to_string(),
            })?;
            certified = certified && psi_star > rp.epsilon;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::norm_constants;

    fn affine_l1() -> AnalyticProblem {
        // F(x) = B x + c with dyadic data.
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.25, 2.0]);
        let bb = b.clone();
        AnalyticProblem {
            name: "affine".into(),
            h: OuterFunction::l1(2),
            region: FeasibleRegion::unconstrained(2),
            x0: vec![1.0, 1.0],
            residual: Arc::new(move |x: &[f64]| {
                vec![bb[(0, 0)] * x[0] + bb[(0, 1)] * x[1] + 0.5, bb[(1, 0)] * x[0] + bb[(1, 1)] * x[1] - 1.0]
            }),
            jacobian: Arc::new(move |_: &[f64]| b.clone()),
            lipschitz_j: 0.0,
            lj_lower: vec![-10.0; 2],
            lj_upper: vec![10.0; 2],
            f_star: Some(0.0),
            term_magnitude: None,
        }
    }

    fn scalar_quadratic() -> AnalyticProblem {
        AnalyticProblem {
            name: "quadratic".into(),
            h: OuterFunction::minimax(1),
            region: FeasibleRegion::unconstrained(3),
            x0: vec![1.0, -2.0, 0.5],
            residual: Arc::new(|x: &[f64]| vec![x[0] * x[0] + 2.0 * x[1] * x[1] + x[2] * x[2] - x[0]]),
            jacobian: Arc::new(|x: &[f64]| DMatrix::from_row_slice(1, 3, &[2.0 * x[0] - 1.0, 4.0 * x[1], 2.0 * x[2]])),
            lipschitz_j: 4.0,
            lj_lower: vec![-10.0; 3],
            lj_upper: vec![10.0; 3],
            f_star: Some(-0.25),
            term_magnitude: None,
        }
    }

    #[test]
    fn psi_two_norm_is_gradient_norm() {
        let ap = scalar_quadratic();
        let x = [0.3, -0.7, 1.1];
        let g = ap.jacobian_at(&x);
        let want = g.norm();
        for r in [0.1, 1.0, 10.0] {
            let got = psi(&ap, &x, PNorm::Two, r).unwrap();
            assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn psi_vanishes_at_a_minimizer() {
        let ap = scalar_quadratic();
        for p in [PNorm::One, PNorm::Two, PNorm::Infinity] {
            assert_eq!(psi(&ap, &[0.5, 0.0, 0.0], p, 1.0).unwrap(), 0.0);
        }
        let mut two = scalar_quadratic();
        two.h = OuterFunction::minimax(1);
        two.region = FeasibleRegion::unconstrained(3).with_inequality(vec![1.0, 0.0, 0.0], 5.0).unwrap();
        assert_eq!(psi(&two, &[0.0; 3], PNorm::Two, 1.0), Err(DiagnosticsError::UnsupportedNorm(PNorm::Two)));
    }

    #[test]
    fn psi_matches_grid_on_affine_l1() {
        let ap = affine_l1();
        let x = [0.25, -0.5];
        let psi1 = psi(&ap, &x, PNorm::One, 1.0).unwrap();
        let grid = eta_bruteforce(&ap.h, &ap.residual_at(&x), &ap.jacobian_at(&x), &ap.region, &x, PNorm::One, 1.0, GRID_RESOLUTION).unwrap();
        assert!((psi1 - grid).abs() <= 2e-3, "{psi1} vs {grid}");
    }

    #[test]
    fn bruteforce_basics() {
        let h = OuterFunction::minimax(1);
        let region = FeasibleRegion::unconstrained(2);
        let zero = DMatrix::zeros(1, 2);
        assert_eq!(eta_bruteforce(&h, &[1.0], &zero, &region, &[0.0; 2], PNorm::One, 0.5, 1e-2).unwrap(), 0.0);
        // Small radius: η tends to the dual norm of the gradient.
        let a = DMatrix::from_row_slice(1, 2, &[3.0, -4.0]);
        let eta1 = eta_bruteforce(&h, &[0.0], &a, &region, &[0.0; 2], PNorm::One, 1e-3, 1e-5).unwrap();
        assert!((eta1 - 4.0).abs() < 1e-9);
        let eta_inf = eta_bruteforce(&h, &[0.0], &a, &region, &[0.0; 2], PNorm::Infinity, 1e-3, 1e-5).unwrap();
        assert!((eta_inf - 7.0).abs() < 1e-9);
        let big = DMatrix::zeros(1, 4);
        assert_eq!(
            eta_bruteforce(&h, &[0.0], &big, &FeasibleRegion::unconstrained(4), &[0.0; 4], PNorm::One, 1.0, 0.1),
            Err(DiagnosticsError::DimensionTooLarge(4))
        );
    }

    #[test]
    fn gap_is_zero_for_affine_and_bounded_otherwise() {
        let ap = affine_l1();
        for tau in [1.0 / 1024.0, 1.0 / 64.0] {
            let g = check_psi_eta_gap(&ap, &[0.5, 0.25], PNorm::One, 1.0, tau).unwrap();
            assert_eq!(g.gap(), 0.0);
            assert!(g.holds());
        }
        let ap = scalar_quadratic();
        for tau in [1e-2, 1e-4] {
            let g = check_psi_eta_gap(&ap, &[0.9, 0.4, -1.3], PNorm::Infinity, 1.0, tau).unwrap();
            assert!(g.holds(), "{g:?}");
            assert!(g.gap() > 0.0);
        }
    }

    #[test]
    fn delta_min_arithmetic() {
        let mut rp = crate::driver::TrfdParams::default()
            .resolve(1, 1, &OuterFunction::minimax(1))
            .unwrap();
        rp.alpha = 0.5;
        rp.theta = 1.0;
        rp.epsilon = 1.0;
        rp.lipschitz_h = 1.0;
        rp.sigma = 1.0;
        rp.consts = norm_constants(PNorm::Two, 5, 5);
        assert_eq!(delta_min(&rp, 1.0), 0.125);
        assert_eq!(delta_min(&rp, 2.0), 0.0625);
        rp.alpha = 0.15;
        rp.epsilon = 1e-15;
        rp.sigma = 1e6;
        let want = 0.85e-15 / 1e6 / 4.0;
        assert!((delta_min(&rp, 1.0) - want).abs() <= 1e-15 * want);
    }

    #[test]
    fn clean_run_passes_the_audit() {
        let bp = crate::testset::find("rosenbrock").unwrap();
        let ap = bp.analytic().unwrap();
        let params = crate::driver::TrfdParams::default();
        let r = crate::driver::solve(&mut bp.problem(), &params).unwrap();
        let report = audit_trace(&r, Some(&ap)).unwrap();
        assert_eq!(report.iterations, r.iterations.len());
        assert!(report.delta_min.unwrap() > 0.0);
    }

    #[test]
    fn corrupted_trace_is_caught_at_its_iteration() {
        let bp = crate::testset::find("rosenbrock").unwrap();
        let r = crate::driver::solve(&mut bp.problem(), &crate::driver::TrfdParams::default()).unwrap();
        let mut bad = r.clone();
        bad.iterations[4].delta *= 2.0;
        assert_eq!(audit_trace(&bad, None).unwrap_err().iteration, Some(4));
        let mut bad = r.clone();
        bad.iterations[2].evals += 1;
        assert_eq!(audit_trace(&bad, None).unwrap_err().iteration, Some(2));
        let mut bad = r;
        bad.total_evals = bad.params.max_evals + 1;
        assert_eq!(audit_trace(&bad, None).unwrap_err().iteration, None);
    }
}

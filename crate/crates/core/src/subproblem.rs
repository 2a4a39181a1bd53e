//! Trust-region subproblem `min h(F(x) + A d)  s.t. ‖d‖_p ≤ r, x + d ∈ Ω`.
//!
//! For p ∈ {1, ∞} and a polyhedral Ω the problem is a linear program. The LP
//! works in the unit ball, `d = r·u`, with epigraph values measured in units
//! of `S = r·maxᵢ ‖Aᵢ‖_q` (q dual to p), so its data are O(1) at any radius:
//!
//! * `h = Σ|·|` adds `wᵢ ≥ 0` and minimizes `Σ wᵢ` subject to `-wᵢ ≤ (Fᵢ + r Aᵢ u)/S ≤ wᵢ`.
//!   Residuals with `|Fᵢ| > r‖Aᵢ‖_q` keep their sign over the ball and enter the
//!   objective linearly instead.
//! * `h = max` adds a free `w` and minimizes it subject to `(Fᵢ − h(F) + r Aᵢ u)/S ≤ w`.
//!   Rows that cannot reach the maximum anywhere in the ball are dropped.
//! * p = ∞ turns the ball into the bounds `-1 ≤ uⱼ ≤ 1`.
//! * p = 1 splits `u = u⁺ − u⁻` with `u⁺, u⁻ ≥ 0` and adds the row `Σ(u⁺ⱼ + u⁻ⱼ) ≤ 1`.
//! * Ω contributes `(lower − x)/r ≤ u ≤ (upper − x)/r` and `a·u ≤ (b − a·x)/r` per inequality.
//!
//! The solution also yields the approximate stationarity measure
//! `η = (h(F(x)) − h(F(x) + A d*)) / r`.

use crate::lp::{solve_lp, LinearProgram, LpError, RowSense};
use crate::norms::{norm, PNorm};
use crate::outer::{OuterFunction, OuterKind};
use crate::problem::FeasibleRegion;
use nalgebra::DMatrix;
use thiserror::Error;

/// η values this close to zero are reported as exactly zero.
pub const ETA_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubproblemError {
    #[error("p = {0} trust regions are not supported by the linear-programming backend")]
    UnsupportedNorm(PNorm),
    #[error("trust-region radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("numerical trouble: {0}")]
    NumericalTrouble(String),
}

impl From<LpError> for SubproblemError {
    fn from(e: LpError) -> Self {
        // d = 0 is always feasible and the objective is bounded below on a
        // compact set, so every LP failure here is numerical.
        SubproblemError::NumericalTrouble(e.to_string())
    }
}

/// How the step `d` is encoded among the LP columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepLayout {
    /// Columns `0..n` hold `u` directly.
    Direct { n: usize },
    /// Columns `0..n` hold `u⁺`, `n..2n` hold `u⁻`, and `u = u⁺ − u⁻`.
    Split { n: usize },
}

impl StepLayout {
    pub fn step_columns(&self) -> usize {
        match *self {
            StepLayout::Direct { n } => n,
            StepLayout::Split { n } => 2 * n,
        }
    }

    pub fn extract(&self, sol: &[f64]) -> Vec<f64> {
        match *self {
            StepLayout::Direct { n } => sol[..n].to_vec(),
            StepLayout::Split { n } => (0..n).map(|j| sol[j] - sol[n + j]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegionLP {
    pub lp: LinearProgram,
    pub layout: StepLayout,
    /// Number of epigraph columns (one per kept residual for the 1-norm sum, 1 for the maximum).
    pub aux_columns: usize,
    pub radius: f64,
    /// Unit of the epigraph columns.
    pub scale: f64,
    pub base_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub d_star: Vec<f64>,
    /// `h(F(x) + A d*)`
    pub model_value: f64,
    pub eta: f64,
}

impl SubproblemSolution {
    /// `h(F(x)) − h(F(x) + A d*)`
    pub fn model_decrease(&self, base_value: f64) -> f64 {
        base_value - self.model_value
    }
}

fn check_inputs(
    h: &OuterFunction,
    f_x: &[f64],
    a: &DMatrix<f64>,
    region: &FeasibleRegion,
    x: &[f64],
    p: PNorm,
    r: f64,
) -> Result<(), SubproblemError> {
    if p == PNorm::Two {
        return Err(SubproblemError::UnsupportedNorm(p));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(SubproblemError::BadRadius(r));
    }
    let (m, n) = a.shape();
    if f_x.len() != m || h.m != m || x.len() != n || region.dim() != n {
        return Err(SubproblemError::Dimension(format!(
            "A is {m}x{n}, F(x) has {}, h expects {}, x has {}, region has {}",
            f_x.len(),
            h.m,
            x.len(),
            region.dim()
        )));
    }
    Ok(())
}

/// Builds the linear program for the given data.
pub fn reformulate(
    h: &OuterFunction,
    f_x: &[f64],
    a: &DMatrix<f64>,
    region: &FeasibleRegion,
    x: &[f64],
    p: PNorm,
    r: f64,
) -> Result<TrustRegionLP, SubproblemError> {
    check_inputs(h, f_x, a, region, x, p, r)?;
    let (m, n) = a.shape();
    let layout = match p {
        PNorm::Infinity => StepLayout::Direct { n },
        _ => StepLayout::Split { n },
    };
    // Largest change of Fᵢ + Aᵢ d over the ball.
    let dual = p.dual();
    let reach: Vec<f64> = (0..m)
        .map(|i| r * norm(&a.row(i).iter().copied().collect::<Vec<_>>(), dual))
        .collect();
    let mut scale = reach.iter().copied().fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        scale = 1.0;
    }
    let base_value = h.eval(f_x);
    let kept: Vec<usize> = match h.kind {
        OuterKind::L1 => (0..m).filter(|&i| f_x[i].abs() <= reach[i]).collect(),
        OuterKind::Minimax => {
            let floor = (0..m).map(|i| f_x[i] - reach[i]).fold(f64::NEG_INFINITY, f64::max);
            (0..m).filter(|&i| f_x[i] + reach[i] >= floor).collect()
        }
    };
    let aux_columns = match h.kind {
        OuterKind::L1 => kept.len(),
        OuterKind::Minimax => 1,
    };
    let step_cols = layout.step_columns();
    let total = step_cols + aux_columns;
    let mut lp = LinearProgram::new(total);

    // Distance from x to the box faces in units of r, never negative so u = 0 stays feasible.
    let room_up = |j: usize| ((region.upper[j] - x[j]) / r).max(0.0);
    let room_down = |j: usize| ((x[j] - region.lower[j]) / r).max(0.0);
    match layout {
        StepLayout::Direct { n } => {
            for j in 0..n {
                lp.lower[j] = -room_down(j).min(1.0);
                lp.upper[j] = room_up(j).min(1.0);
            }
        }
        StepLayout::Split { n } => {
            for j in 0..n {
                lp.lower[j] = 0.0;
                lp.upper[j] = room_up(j).min(1.0);
                lp.lower[n + j] = 0.0;
                lp.upper[n + j] = room_down(j).min(1.0);
            }
        }
    }
    match h.kind {
        OuterKind::L1 => {
            for c in 0..aux_columns {
                lp.cost[step_cols + c] = 1.0;
                lp.lower[step_cols + c] = 0.0;
                lp.upper[step_cols + c] = f64::INFINITY;
            }
        }
        OuterKind::Minimax => {
            lp.cost[step_cols] = 1.0;
            lp.lower[step_cols] = f64::NEG_INFINITY;
            lp.upper[step_cols] = f64::INFINITY;
        }
    }

    // Coefficients of a row `g · u` laid out over the step columns.
    let step_row = |g: &mut dyn Iterator<Item = f64>| -> Vec<f64> {
        let mut row = vec![0.0; total];
        for (j, gj) in g.enumerate() {
            match layout {
                StepLayout::Direct { .. } => row[j] = gj,
                StepLayout::Split { n } => {
                    row[j] = gj;
                    row[n + j] = -gj;
                }
            }
        }
        row
    };
    let k = r / scale;

    if h.kind == OuterKind::L1 {
        for i in (0..m).filter(|i| !kept.contains(i)) {
            let sign = f_x[i].signum();
            let row = step_row(&mut a.row(i).iter().map(|v| sign * k * v));
            lp.cost.iter_mut().zip(&row).for_each(|(c, v)| *c += v);
        }
    }
    for (c, &i) in kept.iter().enumerate() {
        match h.kind {
            OuterKind::L1 => {
                // k Aᵢ u − wᵢ ≤ −Fᵢ/S  and  −k Aᵢ u − wᵢ ≤ Fᵢ/S
                let mut row = step_row(&mut a.row(i).iter().map(|v| k * v));
                row[step_cols + c] = -1.0;
                lp.add_row(row, RowSense::Le, -f_x[i] / scale);
                let mut row = step_row(&mut a.row(i).iter().map(|v| -k * v));
                row[step_cols + c] = -1.0;
                lp.add_row(row, RowSense::Le, f_x[i] / scale);
            }
            OuterKind::Minimax => {
                let mut row = step_row(&mut a.row(i).iter().map(|v| k * v));
                row[step_cols] = -1.0;
                lp.add_row(row, RowSense::Le, (base_value - f_x[i]) / scale);
            }
        }
    }
    if let StepLayout::Split { n } = layout {
        let mut row = vec![0.0; total];
        row[..2 * n].iter_mut().for_each(|v| *v = 1.0);
        lp.add_row(row, RowSense::Le, 1.0);
    }
    for ineq in &region.inequalities {
        let slack: f64 = ineq.b - ineq.a.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        let row = step_row(&mut ineq.a.iter().copied());
        lp.add_row(row, RowSense::Le, (slack / r).max(0.0));
    }

    Ok(TrustRegionLP {
        lp,
        layout,
        aux_columns,
        radius: r,
        scale,
        base_value,
    })
}

/// Model vector `F(x) + A d`.
pub fn model_point(f_x: &[f64], a: &DMatrix<f64>, d: &[f64]) -> Vec<f64> {
    (0..f_x.len())
        .map(|i| f_x[i] + a.row(i).iter().zip(d).map(|(aij, dj)| aij * dj).sum::<f64>())
        .collect()
}

/// Solves the subproblem exactly and reports the minimizer, its model value and η.
pub fn solve_tr_subproblem(
    h: &OuterFunction,
    f_x: &[f64],
    a: &DMatrix<f64>,
    region: &FeasibleRegion,
    x: &[f64],
    p: PNorm,
    r: f64,
) -> Result<SubproblemSolution, SubproblemError> {
    let tr = reformulate(h, f_x, a, region, x, p, r)?;
    solve_reformulated(h, f_x, a, region, x, p, &tr)
}

pub(crate) fn solve_reformulated(
    h: &OuterFunction,
    f_x: &[f64],
    a: &DMatrix<f64>,
    region: &FeasibleRegion,
    x: &[f64],
    p: PNorm,
    tr: &TrustRegionLP,
) -> Result<SubproblemSolution, SubproblemError> {
    let r = tr.radius;
    let sol = solve_lp(&tr.lp)?;
    let mut d: Vec<f64> = tr.layout.extract(&sol.x).iter().map(|u| r * u).collect();

    // Snap tiny violations of the box and the ball back inside.
    for j in 0..d.len() {
        let lo = -(x[j] - region.lower[j]).max(0.0);
        let hi = (region.upper[j] - x[j]).max(0.0);
        d[j] = d[j].clamp(lo, hi);
    }
    let len = norm(&d, p);
    if len > r {
        let s = r / len;
        d.iter_mut().for_each(|v| *v *= s);
    }

    let base = tr.base_value;
    let mut model_value = h.eval(&model_point(f_x, a, &d));
    if !(model_value <= base) {
        d.iter_mut().for_each(|v| *v = 0.0);
        model_value = base;
    }
    let mut eta = (base - model_value) / r;
    if eta < ETA_ZERO_TOL {
        eta = 0.0;
    }
    if !eta.is_finite() {
        return Err(SubproblemError::NumericalTrouble(format!("η = {eta}")));
    }
    Ok(SubproblemSolution {
        d_star: d,
        model_value,
        eta,
    })
}

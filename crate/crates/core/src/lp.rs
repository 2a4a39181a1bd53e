//! Dense bounded-variable primal simplex.
//!
//! Solves
//!
//! ```text
//! minimize    cᵀx
//! subject to  aᵢ·x {≤,=,≥} bᵢ     for every row i
//!             l ≤ x ≤ u           (bounds may be infinite)
//! ```
//!
//! Each row gets a slack so the constraint matrix is `[A | I]`. Rows whose
//! slack cannot start inside its bounds receive an artificial column, and a
//! phase-one objective drives those to zero. The basis inverse is kept
//! explicitly and refactorized from scratch every [`REFACTOR_EVERY`] pivots.
//!
//! Pricing is Dantzig's largest reduced cost. After `5·(vars + rows)`
//! consecutive degenerate pivots the solver switches to Bland's rule
//! (lowest-index entering and leaving variables) until a pivot makes progress.

use std::fmt::Write as _;
use thiserror::Error;

/// Primal feasibility and reduced-cost tolerance.
pub const LP_TOL: f64 = 1e-9;
/// Residual above which a returned vertex is rejected as numerically unreliable.
pub const RESIDUAL_LIMIT: f64 = 1e-6;
const REFACTOR_EVERY: usize = 50;
const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
    /// Largest row or bound violation of `x`.
    pub residual: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("numerical trouble in simplex: {0}")]
    NumericalTrouble(String),
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            cost: vec![0.0; num_vars],
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: RowSense, rhs: f64) {
        self.rows.push(Row { coeffs, sense, rhs });
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.cost, x)
    }

    /// Largest violation of rows and bounds at `x`, each row scaled by its magnitude.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.num_vars() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for row in &self.rows {
            let ax = dot(&row.coeffs, x);
            let scale = 1.0
                + row.rhs.abs()
                + row.coeffs.iter().zip(x).map(|(a, v)| (a * v).abs()).fold(0.0, f64::max);
            let v = match row.sense {
                RowSense::Le => ax - row.rhs,
                RowSense::Ge => row.rhs - ax,
                RowSense::Eq => (ax - row.rhs).abs(),
            };
            worst = worst.max(v / scale);
        }
        worst
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed("bound vectors do not match cost length".into()));
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() || !self.cost[j].is_finite() {
                return Err(LpError::Malformed(format!("non-finite data in column {j}")));
            }
            if self.lower[j] > self.upper[j] {
                return Err(LpError::Infeasible);
            }
            if self.lower[j] == f64::INFINITY || self.upper[j] == f64::NEG_INFINITY {
                return Err(LpError::Infeasible);
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::Malformed(format!("row {i} has {} coefficients", row.coeffs.len())));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(LpError::Malformed(format!("non-finite data in row {i}")));
            }
        }
        Ok(())
    }

    /// Renders the program in fixed-column MPS format.
    pub fn to_mps(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME          {name}");
        let _ = writeln!(out, "ROWS");
        let _ = writeln!(out, " N  COST");
        for (i, row) in self.rows.iter().enumerate() {
            let tag = match row.sense {
                RowSense::Le => "L",
                RowSense::Ge => "G",
                RowSense::Eq => "E",
            };
            let _ = writeln!(out, " {tag:<2} R{i}");
        }
        let _ = writeln!(out, "COLUMNS");
        for j in 0..self.num_vars() {
            let col = format!("X{j}");
            if self.cost[j] != 0.0 {
                let _ = writeln!(out, "    {col:<8}  {:<8}  {:>12e}", "COST", self.cost[j]);
            }
            for (i, row) in self.rows.iter().enumerate() {
                if row.coeffs[j] != 0.0 {
                    let _ = writeln!(out, "    {col:<8}  {:<8}  {:>12e}", format!("R{i}"), row.coeffs[j]);
                }
            }
        }
        let _ = writeln!(out, "RHS");
        for (i, row) in self.rows.iter().enumerate() {
            if row.rhs != 0.0 {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12e}", "RHS", format!("R{i}"), row.rhs);
            }
        }
        let _ = writeln!(out, "BOUNDS");
        for j in 0..self.num_vars() {
            let (l, u) = (self.lower[j], self.upper[j]);
            let col = format!("X{j}");
            if l == f64::NEG_INFINITY && u == f64::INFINITY {
                let _ = writeln!(out, " FR BND       {col:<8}");
            } else if l == u {
                let _ = writeln!(out, " FX BND       {col:<8}  {l:>12e}");
            } else {
                if l == f64::NEG_INFINITY {
                    let _ = writeln!(out, " MI BND       {col:<8}");
                } else if l != 0.0 {
                    let _ = writeln!(out, " LO BND       {col:<8}  {l:>12e}");
                }
                if u != f64::INFINITY {
                    let _ = writeln!(out, " UP BND       {col:<8}  {u:>12e}");
                }
            }
        }
        let _ = writeln!(out, "ENDATA");
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Free nonbasic variable parked at zero.
    Zero,
}

/// Column layout: structural, slack (one per row), artificial (as needed).
struct Tableau<'a> {
    lp: &'a LinearProgram,
    rows: usize,
    structural: usize,
    /// For each artificial column: its row and sign.
    artificials: Vec<(usize, f64)>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Row-major `rows × rows` inverse of the basis matrix.
    binv: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
}

impl<'a> Tableau<'a> {
    fn num_cols(&self) -> usize {
        self.structural + self.rows + self.artificials.len()
    }

    /// Entry `(i, j)` of `[A | I | ±e]`.
    fn column(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if j < self.structural {
            for (i, row) in self.lp.rows.iter().enumerate() {
                out[i] = row.coeffs[j];
            }
        } else if j < self.structural + self.rows {
            out[j - self.structural] = 1.0;
        } else {
            let (row, sign) = self.artificials[j - self.structural - self.rows];
            out[row] = sign;
        }
    }

    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.structural {
            self.lp.rows.iter().zip(y).map(|(r, yi)| r.coeffs[j] * yi).sum()
        } else if j < self.structural + self.rows {
            y[j - self.structural]
        } else {
            let (row, sign) = self.artificials[j - self.structural - self.rows];
            sign * y[row]
        }
    }

    fn new(lp: &'a LinearProgram) -> Self {
        let rows = lp.num_rows();
        let structural = lp.num_vars();
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        let mut x = Vec::with_capacity(structural + rows);
        let mut state = Vec::with_capacity(structural + rows);
        for j in 0..structural {
            let (l, u) = (lower[j], upper[j]);
            if l.is_finite() {
                x.push(l);
                state.push(VarState::AtLower);
            } else if u.is_finite() {
                x.push(u);
                state.push(VarState::AtUpper);
            } else {
                x.push(0.0);
                state.push(VarState::Zero);
            }
        }
        for row in &lp.rows {
            let (l, u) = match row.sense {
                RowSense::Le => (0.0, f64::INFINITY),
                RowSense::Ge => (f64::NEG_INFINITY, 0.0),
                RowSense::Eq => (0.0, 0.0),
            };
            lower.push(l);
            upper.push(u);
        }
        let mut artificials = Vec::new();
        let mut basis = Vec::with_capacity(rows);
        let mut slack_values = Vec::with_capacity(rows);
        for (i, row) in lp.rows.iter().enumerate() {
            let r = row.rhs - dot(&row.coeffs, &x[..structural]);
            let (l, u) = (lower[structural + i], upper[structural + i]);
            if r >= l - LP_TOL && r <= u + LP_TOL {
                slack_values.push((r, VarState::Basic(i)));
                basis.push(structural + i);
            } else {
                let parked = if r < l { l } else { u };
                let state = if r < l { VarState::AtLower } else { VarState::AtUpper };
                slack_values.push((parked, state));
                let sign = if r > parked { 1.0 } else { -1.0 };
                artificials.push((i, sign));
                basis.push(usize::MAX);
            }
        }
        for (v, s) in slack_values {
            x.push(v);
            state.push(s);
        }
        for (k, &(i, sign)) in artificials.iter().enumerate() {
            let j = structural + rows + k;
            let r = lp.rows[i].rhs - dot(&lp.rows[i].coeffs, &x[..structural]) - x[structural + i];
            x.push(sign * r);
            lower.push(0.0);
            upper.push(f64::INFINITY);
            state.push(VarState::Basic(i));
            basis[i] = j;
        }
        let mut binv = vec![0.0; rows * rows];
        for i in 0..rows {
            let j = basis[i];
            let diag = if j >= structural + rows {
                artificials[j - structural - rows].1
            } else {
                1.0
            };
            binv[i * rows + i] = 1.0 / diag;
        }
        Tableau {
            lp,
            rows,
            structural,
            artificials,
            lower,
            upper,
            x,
            state,
            basis,
            binv,
            pivots: 0,
            since_refactor: 0,
        }
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination and recomputes basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.rows;
        if m == 0 {
            return Ok(());
        }
        let mut mat = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for i in 0..m {
                mat[i * m + k] = col[i];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let (p, pmax) = (c..m)
                .map(|r| (r, mat[r * m + c].abs()))
                .fold((c, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax < 1e-13 {
                return Err(LpError::NumericalTrouble("singular basis".into()));
            }
            if p != c {
                for k in 0..m {
                    mat.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let piv = mat[c * m + c];
            for k in 0..m {
                mat[c * m + k] /= piv;
                inv[c * m + k] /= piv;
            }
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = mat[r * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        mat[r * m + k] -= f * mat[c * m + k];
                        inv[r * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        self.binv = inv;
        self.since_refactor = 0;
        self.recompute_basics();
        Ok(())
    }

    fn recompute_basics(&mut self) {
        let m = self.rows;
        let mut rhs: Vec<f64> = self.lp.rows.iter().map(|r| r.rhs).collect();
        let mut col = vec![0.0; m];
        for j in 0..self.num_cols() {
            if matches!(self.state[j], VarState::Basic(_)) || self.x[j] == 0.0 {
                continue;
            }
            self.column(j, &mut col);
            for i in 0..m {
                rhs[i] -= col[i] * self.x[j];
            }
        }
        for i in 0..m {
            let v = (0..m).map(|k| self.binv[i * m + k] * rhs[k]).sum();
            self.x[self.basis[i]] = v;
        }
    }

    /// Runs simplex iterations for `cost` until optimal.
    fn optimize(&mut self, cost: &[f64], allow: impl Fn(usize) -> bool) -> Result<(), LpError> {
        let m = self.rows;
        let ncols = self.num_cols();
        let degenerate_limit = 5 * (self.structural + m);
        let max_pivots = 100 * (ncols + m) + 1000;
        let mut degenerate_run = 0usize;
        let mut y = vec![0.0; m];
        let mut w = vec![0.0; m];
        let mut col = vec![0.0; m];
        loop {
            if self.pivots > max_pivots {
                return Err(LpError::NumericalTrouble("pivot limit exceeded".into()));
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let bland = degenerate_run > degenerate_limit;
            // y = c_Bᵀ B⁻¹
            for k in 0..m {
                y[k] = (0..m).map(|i| cost[self.basis[i]] * self.binv[i * m + k]).sum();
            }
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..ncols {
                if !allow(j) || self.lower[j] == self.upper[j] {
                    continue;
                }
                let d = cost[j] - self.column_dot(j, &y);
                let eligible = match self.state[j] {
                    VarState::Basic(_) => false,
                    VarState::AtLower => d < -LP_TOL,
                    VarState::AtUpper => d > LP_TOL,
                    VarState::Zero => d.abs() > LP_TOL,
                };
                if !eligible {
                    continue;
                }
                match entering {
                    None => entering = Some((j, d)),
                    Some((_, best)) if !bland && d.abs() > best.abs() => entering = Some((j, d)),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some((q, dq)) = entering else {
                return Ok(());
            };
            let dir = if dq < 0.0 { 1.0 } else { -1.0 };
            self.column(q, &mut col);
            for i in 0..m {
                w[i] = (0..m).map(|k| self.binv[i * m + k] * col[k]).sum();
            }
            let wmax = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let piv_tol = PIVOT_TOL * wmax.max(1.0);

            // Ratio test. Basic variable i moves by -dir * w[i] per unit step.
            let mut step = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, bool)> = None;
            let ratio = |i: usize, this: &Self| -> Option<(f64, bool)> {
                let delta = -dir * w[i];
                if w[i].abs() <= piv_tol {
                    return None;
                }
                let b = this.basis[i];
                if delta < 0.0 && this.lower[b].is_finite() {
                    Some(((this.x[b] - this.lower[b]).max(0.0) / -delta, false))
                } else if delta > 0.0 && this.upper[b].is_finite() {
                    Some(((this.upper[b] - this.x[b]).max(0.0) / delta, true))
                } else {
                    None
                }
            };
            if bland {
                for i in 0..m {
                    if let Some((t, to_upper)) = ratio(i, self) {
                        let better = match leave {
                            None => t < step || (t == step && step.is_finite()),
                            Some((l, _)) => t < step || (t == step && self.basis[i] < self.basis[l]),
                        };
                        if better {
                            step = t;
                            leave = Some((i, to_upper));
                        }
                    }
                }
            } else {
                // Harris two-pass: bound the step with relaxed bounds, then
                // take the largest pivot among rows that block within it.
                let mut relaxed = step;
                for i in 0..m {
                    let delta = -dir * w[i];
                    if w[i].abs() <= piv_tol {
                        continue;
                    }
                    let b = self.basis[i];
                    let t = if delta < 0.0 && self.lower[b].is_finite() {
                        (self.x[b] - self.lower[b] + LP_TOL).max(0.0) / -delta
                    } else if delta > 0.0 && self.upper[b].is_finite() {
                        (self.upper[b] - self.x[b] + LP_TOL).max(0.0) / delta
                    } else {
                        continue;
                    };
                    relaxed = relaxed.min(t);
                }
                let mut best_piv = 0.0;
                for i in 0..m {
                    if let Some((t, to_upper)) = ratio(i, self) {
                        if t <= relaxed && w[i].abs() > best_piv {
                            best_piv = w[i].abs();
                            leave = Some((i, to_upper));
                        }
                    }
                }
                if let Some((i, _)) = leave {
                    let (t, _) = ratio(i, self).expect("leaving row has a ratio");
                    if step <= t {
                        leave = None;
                    } else {
                        step = t;
                    }
                }
            }
            if !step.is_finite() {
                // Small pivots were skipped; rule out a stale inverse, then accept any nonzero pivot.
                if self.since_refactor > 0 {
                    self.refactor()?;
                    continue;
                }
                for i in 0..m {
                    let b = self.basis[i];
                    let delta = -dir * w[i];
                    let t = if delta < 0.0 && self.lower[b].is_finite() {
                        (self.x[b] - self.lower[b]).max(0.0) / -delta
                    } else if delta > 0.0 && self.upper[b].is_finite() {
                        (self.upper[b] - self.x[b]).max(0.0) / delta
                    } else {
                        continue;
                    };
                    if t < step {
                        step = t;
                        leave = Some((i, delta > 0.0));
                    }
                }
                if !step.is_finite() {
                    return Err(LpError::Unbounded);
                }
            }
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.x[q] += dir * step;
            for i in 0..m {
                let b = self.basis[i];
                self.x[b] -= dir * step * w[i];
            }
            self.pivots += 1;
            match leave {
                None => {
                    // Bound flip.
                    if dir > 0.0 {
                        self.x[q] = self.upper[q];
                        self.state[q] = VarState::AtUpper;
                    } else {
                        self.x[q] = self.lower[q];
                        self.state[q] = VarState::AtLower;
                    }
                }
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    if to_upper {
                        self.x[out] = self.upper[out];
                        self.state[out] = VarState::AtUpper;
                    } else {
                        self.x[out] = self.lower[out];
                        self.state[out] = VarState::AtLower;
                    }
                    self.basis[r] = q;
                    self.state[q] = VarState::Basic(r);
                    let pr = w[r];
                    for k in 0..m {
                        self.binv[r * m + k] /= pr;
                    }
                    for i in 0..m {
                        if i == r || w[i] == 0.0 {
                            continue;
                        }
                        let f = w[i];
                        for k in 0..m {
                            self.binv[i * m + k] -= f * self.binv[r * m + k];
                        }
                    }
                    self.since_refactor += 1;
                }
            }
        }
    }
}

/// Solves `lp` to optimality, returning an optimal basic solution.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let mut tab = Tableau::new(lp);
    let ncols = tab.num_cols();
    let first_artificial = tab.structural + tab.rows;

    if !tab.artificials.is_empty() {
        let phase1: Vec<f64> = (0..ncols).map(|j| if j >= first_artificial { 1.0 } else { 0.0 }).collect();
        tab.optimize(&phase1, |_| true)?;
        tab.refactor()?;
        let infeas: f64 = tab.x[first_artificial..].iter().map(|v| v.max(0.0)).sum();
        let scale = 1.0 + lp.rows.iter().fold(0.0f64, |a, r| a.max(r.rhs.abs()));
        if infeas > LP_TOL * scale {
            return Err(LpError::Infeasible);
        }
        for j in first_artificial..ncols {
            tab.lower[j] = 0.0;
            tab.upper[j] = 0.0;
            if !matches!(tab.state[j], VarState::Basic(_)) {
                tab.x[j] = 0.0;
                tab.state[j] = VarState::AtLower;
            }
        }
    }

    let mut phase2 = lp.cost.clone();
    phase2.resize(ncols, 0.0);
    tab.optimize(&phase2, |j| j < first_artificial)?;
    tab.refactor()?;

    let mut x: Vec<f64> = tab.x[..tab.structural].to_vec();
    for j in 0..x.len() {
        x[j] = x[j].clamp(lp.lower[j], lp.upper[j]);
    }
    let residual = lp.residual(&x);
    if residual > RESIDUAL_LIMIT {
        return Err(LpError::NumericalTrouble(format!("constraint residual {residual:e}")));
    }
    Ok(LpSolution {
        objective: lp.objective(&x),
        x,
        pivots: tab.pivots,
        residual,
    })
}

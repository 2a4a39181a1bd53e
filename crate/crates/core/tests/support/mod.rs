//! Random instances and independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use trfd_core::diagnostics::AnalyticProblem;
use trfd_core::lp::{LinearProgram, RowSense};
use trfd_core::{FeasibleRegion, OuterFunction, OuterKind, PNorm};

pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// `Fᵢ(x) = cᵢ + gᵢ·x + ½ xᵀHᵢx` with symmetric `Hᵢ`.
///
/// `J(x)` has rows `gᵢ + Hᵢx`, so `‖J(x) − J(y)‖₂ ≤ ‖J(x) − J(y)‖_F ≤ (Σᵢ‖Hᵢ‖₂²)^{1/2} ‖x − y‖₂`.
pub fn random_quadratic(rng: &mut ChaCha8Rng, kind: OuterKind, n: usize, m: usize, curvature: f64) -> AnalyticProblem {
    let c = uniform(rng, m, -2.0, 2.0);
    let g: Vec<Vec<f64>> = (0..m).map(|_| uniform(rng, n, -3.0, 3.0)).collect();
    let h: Vec<DMatrix<f64>> = (0..m)
        .map(|_| {
            let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-curvature..=curvature));
            (&b + b.transpose()) * 0.5
        })
        .collect();
    let lipschitz_j = h.iter().map(|hi| spectral_norm(hi).powi(2)).sum::<f64>().sqrt();
    let (cc, gg, hh) = (c.clone(), g.clone(), h.clone());
    let (mc, mg, mh) = (c.clone(), g.clone(), h.clone());
    let term_magnitude = Arc::new(move |x: &[f64]| {
        let xa = DVector::from_iterator(x.len(), x.iter().map(|v| v.abs()));
        (0..mc.len())
            .map(|i| mc[i].abs() + mg[i].iter().zip(x).map(|(a, b)| (a * b).abs()).sum::<f64>() + 0.5 * xa.dot(&(mh[i].abs() * &xa)))
            .collect::<Vec<f64>>()
    });
    let residual = Arc::new(move |x: &[f64]| {
        let xv = DVector::from_column_slice(x);
        (0..cc.len())
            .map(|i| cc[i] + gg[i].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + 0.5 * xv.dot(&(&hh[i] * &xv)))
            .collect::<Vec<f64>>()
    });
    let jacobian = Arc::new(move |x: &[f64]| {
        let xv = DVector::from_column_slice(x);
        let mut j = DMatrix::zeros(m, n);
        for i in 0..m {
            let row = &h[i] * &xv;
            for k in 0..n {
                j[(i, k)] = g[i][k] + row[k];
            }
        }
        j
    });
    AnalyticProblem {
        name: format!("quadratic_{kind:?}_{n}x{m}"),
        h: OuterFunction::new(kind, m),
        region: FeasibleRegion::unconstrained(n),
        x0: uniform(rng, n, -2.0, 2.0),
        residual,
        jacobian,
        lipschitz_j,
        lj_lower: vec![f64::NEG_INFINITY; n],
        lj_upper: vec![f64::INFINITY; n],
        f_star: None,
        term_magnitude: Some(term_magnitude),
    }
}

/// `F(x) = D(x − x*)` with dyadic diagonal `D`, dyadic `x*` and integer `x₀`.
///
/// With `minimax` the residuals are `±D(x − x*)`, so `h` is a weighted ∞-norm.
pub fn dyadic_affine(rng: &mut ChaCha8Rng, kind: OuterKind, n: usize) -> AnalyticProblem {
    let d: Vec<f64> = (0..n)
        .map(|_| {
            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            s * 2f64.powi(rng.random_range(-2..=2))
        })
        .collect();
    let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-16..=16) as f64 / 8.0).collect();
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    let m = match kind {
        OuterKind::L1 => n,
        OuterKind::Minimax => 2 * n,
    };
    let (dd, xx) = (d.clone(), xs.clone());
    let residual = Arc::new(move |x: &[f64]| {
        let r: Vec<f64> = (0..x.len()).map(|i| dd[i] * (x[i] - xx[i])).collect();
        match kind {
            OuterKind::L1 => r,
            OuterKind::Minimax => r.iter().copied().chain(r.iter().map(|v| -v)).collect(),
        }
    });
    let jacobian = Arc::new(move |_: &[f64]| {
        DMatrix::from_fn(m, n, |i, j| {
            let (row, sign) = if i < n { (i, 1.0) } else { (i - n, -1.0) };
            if row == j {
                sign * d[j]
            } else {
                0.0
            }
        })
    });
    AnalyticProblem {
        name: format!("dyadic_affine_{kind:?}_{n}"),
        h: OuterFunction::new(kind, m),
        region: FeasibleRegion::unconstrained(n),
        x0,
        residual,
        jacobian,
        lipschitz_j: 0.0,
        lj_lower: vec![f64::NEG_INFINITY; n],
        lj_upper: vec![f64::INFINITY; n],
        f_star: Some(0.0),
        term_magnitude: None,
    }
}

/// Random feasible LP with finite bounds on every structural variable.
pub fn random_lp(rng: &mut ChaCha8Rng, vars: usize, rows: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(vars);
    for j in 0..vars {
        lp.cost[j] = rng.random_range(-1.0..1.0);
        lp.lower[j] = rng.random_range(-2.0..0.0);
        lp.upper[j] = rng.random_range(0.0..2.0);
    }
    let inside: Vec<f64> = (0..vars).map(|j| rng.random_range(lp.lower[j]..lp.upper[j])).collect();
    for _ in 0..rows {
        let a = uniform(rng, vars, -1.0, 1.0);
        let at: f64 = a.iter().zip(&inside).map(|(x, y)| x * y).sum();
        let (sense, rhs) = match rng.random_range(0..3) {
            0 => (RowSense::Le, at + rng.random_range(0.0..0.5)),
            1 => (RowSense::Ge, at - rng.random_range(0.0..0.5)),
            _ => (RowSense::Eq, at),
        };
        lp.add_row(a, sense, rhs);
    }
    lp
}

/// Exhaustive vertex enumeration for LPs whose structural variables are all bounded.
///
/// Each row gets a slack (`≤`: `s ≥ 0`, `≥`: `s ≤ 0`, `=`: `s = 0`) so that
/// `A x + s = b`. Every basic solution picks `rows` basic columns, fixes the
/// rest at one of their finite bounds and solves for the basic values.
pub fn lp_vertex_enumeration(lp: &LinearProgram) -> Option<f64> {
    let nv = lp.num_vars();
    let nr = lp.num_rows();
    let total = nv + nr;
    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    for row in &lp.rows {
        let (lo, hi) = match row.sense {
            RowSense::Le => (0.0, f64::INFINITY),
            RowSense::Ge => (f64::NEG_INFINITY, 0.0),
            RowSense::Eq => (0.0, 0.0),
        };
        lower.push(lo);
        upper.push(hi);
    }
    let col = |j: usize| -> DVector<f64> {
        if j < nv {
            DVector::from_fn(nr, |i, _| lp.rows[i].coeffs[j])
        } else {
            DVector::from_fn(nr, |i, _| f64::from(i == j - nv))
        }
    };
    let b = DVector::from_fn(nr, |i, _| lp.rows[i].rhs);
    let mut best: Option<f64> = None;

    for basis in combinations(total, nr) {
        let nonbasic: Vec<usize> = (0..total).filter(|j| !basis.contains(j)).collect();
        let bm = DMatrix::from_columns(&basis.iter().map(|&j| col(j)).collect::<Vec<_>>());
        let Some(lu_inv) = bm.clone().try_inverse() else { continue };
        if (&bm * &lu_inv - DMatrix::identity(nr, nr)).amax() > 1e-9 {
            continue;
        }
        // Each nonbasic column sits at one of its finite bounds.
        let choices: Vec<Vec<f64>> = nonbasic
            .iter()
            .map(|&j| [lower[j], upper[j]].into_iter().filter(|v| v.is_finite()).collect::<Vec<_>>())
            .collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut pick = vec![0usize; nonbasic.len()];
        loop {
            let mut x = vec![0.0; total];
            let mut rhs = b.clone();
            for (k, &j) in nonbasic.iter().enumerate() {
                x[j] = choices[k][pick[k]];
                rhs -= col(j) * x[j];
            }
            let xb = &lu_inv * rhs;
            for (k, &j) in basis.iter().enumerate() {
                x[j] = xb[k];
            }
            let feasible = (0..total).all(|j| x[j] >= lower[j] - 1e-9 && x[j] <= upper[j] + 1e-9);
            if feasible {
                let obj: f64 = (0..nv).map(|j| lp.cost[j] * x[j]).sum();
                best = Some(best.map_or(obj, |v: f64| v.min(obj)));
            }
            // Next bound assignment.
            let mut k = 0;
            while k < pick.len() {
                pick[k] += 1;
                if pick[k] < choices[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
            if k == pick.len() {
                break;
            }
        }
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            if n - j < k - cur.len() {
                break;
            }
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn random_norm(rng: &mut ChaCha8Rng) -> PNorm {
    if rng.random_bool(0.5) {
        PNorm::One
    } else {
        PNorm::Infinity
    }
}

pub fn random_kind(rng: &mut ChaCha8Rng) -> OuterKind {
    if rng.random_bool(0.5) {
        OuterKind::L1
    } else {
        OuterKind::Minimax
    }
}

//! Benchmark registry: smooth residual vectors composed with `Σ|·|` and classic minimax functions.
//!
//! `f_ref` and `f_x0` are the output of `scripts/reference_optima.py --starts 20
//! --seed 20240101`, which restates every problem independently and minimizes it
//! by multi-start SLSQP on the epigraph form followed by Nelder–Mead.
//!
//! Problems with a [`Certificate`] carry an analytic Jacobian. Every certified
//! `L_J` below bounds `‖J(x) − J(y)‖_F / ‖x − y‖₂` on all of ℝⁿ, obtained from
//! constant second derivatives; the stated box is where tests sample.

use crate::diagnostics::{AnalyticProblem, JacobianFn};
use crate::oracle::{BlackBoxOracle, ResidualFn};
use crate::outer::{OuterFunction, OuterKind};
use crate::problem::{FeasibleRegion, Problem};
use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct Certificate {
    pub jacobian: JacobianFn,
    pub lipschitz_j: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone)]
pub struct BenchmarkProblem {
    pub name: &'static str,
    pub family: OuterKind,
    pub n: usize,
    pub m: usize,
    pub x0: Vec<f64>,
    /// Best value found by the reference script.
    pub f_ref: f64,
    /// `f(x₀)` as computed by the reference script.
    pub f_x0: f64,
    pub residual: ResidualFn,
    pub certificate: Option<Certificate>,
}

impl fmt::Debug for BenchmarkProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkProblem")
            .field("name", &self.name)
            .field("family", &self.family)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("f_ref", &self.f_ref)
            .field("certified", &self.certificate.is_some())
            .finish_non_exhaustive()
    }
}

impl BenchmarkProblem {
    pub fn outer(&self) -> OuterFunction {
        OuterFunction::new(self.family, self.m)
    }

    pub fn f(&self, x: &[f64]) -> f64 {
        self.outer().eval(&(self.residual)(x))
    }

    pub fn oracle(&self) -> BlackBoxOracle {
        BlackBoxOracle::from_fn(self.n, self.m, self.residual.clone())
    }

    /// Fresh unconstrained problem from the standard start.
    pub fn problem(&self) -> Problem {
        Problem::new(self.name, self.outer(), FeasibleRegion::unconstrained(self.n), self.x0.clone(), self.oracle())
            .expect("registry entries are well formed")
    }

    pub fn analytic(&self) -> Option<AnalyticProblem> {
        let c = self.certificate.as_ref()?;
        Some(AnalyticProblem {
            name: self.name.to_string(),
            h: self.outer(),
            region: FeasibleRegion::unconstrained(self.n),
            x0: self.x0.clone(),
            residual: self.residual.clone(),
            jacobian: c.jacobian.clone(),
            lipschitz_j: c.lipschitz_j,
            lj_lower: c.lower.clone(),
            lj_upper: c.upper.clone(),
            f_star: Some(self.f_ref),
            term_magnitude: None,
        })
    }
}

fn residual(f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> ResidualFn {
    Arc::new(f)
}

fn certificate(
    n: usize,
    half_width: f64,
    lipschitz_j: f64,
    jacobian: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
) -> Option<Certificate> {
    Some(Certificate {
        jacobian: Arc::new(jacobian),
        lipschitz_j,
        lower: vec![-half_width; n],
        upper: vec![half_width; n],
    })
}

#[allow(clippy::too_many_arguments)]
fn entry(
    name: &'static str,
    family: OuterKind,
    m: usize,
    x0: Vec<f64>,
    f_x0: f64,
    f_ref: f64,
    residual: ResidualFn,
    certificate: Option<Certificate>,
) -> BenchmarkProblem {
    BenchmarkProblem {
        name,
        family,
        n: x0.len(),
        m,
        x0,
        f_ref,
        f_x0,
        residual,
        certificate,
    }
}

fn linear_full_rank(n: usize, m: usize) -> ResidualFn {
    residual(move |x| {
        let s: f64 = x.iter().sum();
        let tail = -2.0 * s / m as f64 - 1.0;
        (0..m).map(|i| if i < n { x[i] + tail } else { tail }).collect()
    })
}

fn linear_rank1(n: usize, m: usize) -> ResidualFn {
    residual(move |x| {
        let s: f64 = (0..n).map(|j| (j + 1) as f64 * x[j]).sum();
        (1..=m).map(|i| i as f64 * s - 1.0).collect()
    })
}

fn linear_rank1_zero(n: usize, m: usize) -> ResidualFn {
    residual(move |x| {
        let s: f64 = (1..n - 1).map(|j| (j + 1) as f64 * x[j]).sum();
        (0..m)
            .map(|i| if i == 0 || i == m - 1 { -1.0 } else { i as f64 * s - 1.0 })
            .collect()
    })
}

fn linear_full_rank_jacobian(n: usize, m: usize) -> Option<Certificate> {
    certificate(n, f64::INFINITY, 0.0, move |_| {
        DMatrix::from_fn(m, n, |i, j| f64::from(i == j) - 2.0 / m as f64)
    })
}

fn linear_rank1_jacobian(n: usize, m: usize) -> Option<Certificate> {
    certificate(n, f64::INFINITY, 0.0, move |_| {
        DMatrix::from_fn(m, n, |i, j| ((i + 1) * (j + 1)) as f64)
    })
}

fn linear_rank1_zero_jacobian(n: usize, m: usize) -> Option<Certificate> {
    certificate(n, f64::INFINITY, 0.0, move |_| {
        DMatrix::from_fn(m, n, |i, j| {
            if i == 0 || i == m - 1 || j == 0 || j == n - 1 {
                0.0
            } else {
                (i * (j + 1)) as f64
            }
        })
    })
}

fn brown_dennis(x: &[f64]) -> Vec<f64> {
    (1..=20)
        .map(|i| {
            let t = i as f64 / 5.0;
            let a = x[0] + t * x[1] - t.exp();
            let b = x[2] + x[3] * t.sin() - t.cos();
            a * a + b * b
        })
        .collect()
}

fn signed_ramp(n: usize) -> Vec<f64> {
    (1..=n).map(|i| if i <= n / 2 { i as f64 } else { -(i as f64) }).collect()
}

const BARD_Y: [f64; 15] = [
    0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39, 0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39,
];

const GAUSSIAN_Y: [f64; 15] = [
    0.0009, 0.0044, 0.0175, 0.0540, 0.1295, 0.2420, 0.3521, 0.3989, 0.3521, 0.2420, 0.1295, 0.0540, 0.0175,
    0.0044, 0.0009,
];

const KOWALIK_Y: [f64; 11] = [
    0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246,
];
const KOWALIK_U: [f64; 11] = [4.0, 2.0, 1.0, 0.5, 0.25, 0.167, 0.125, 0.1, 0.0833, 0.0714, 0.0625];

const OSBORNE1_Y: [f64; 33] = [
    0.844, 0.908, 0.932, 0.936, 0.925, 0.908, 0.881, 0.850, 0.818, 0.784, 0.751, 0.718, 0.685, 0.658, 0.628,
    0.603, 0.580, 0.558, 0.538, 0.522, 0.506, 0.490, 0.478, 0.467, 0.457, 0.448, 0.438, 0.431, 0.424, 0.420,
    0.414, 0.411, 0.406,
];

fn l1_family() -> Vec<BenchmarkProblem> {
    use OuterKind::L1;
    let s5 = 5f64.sqrt();
    let s10 = 10f64.sqrt();
    let s90 = 90f64.sqrt();
    vec![
        entry("linear_full_rank", L1, 10, vec![1.0; 6], 1.6e1, 4.9999999999999982e0, linear_full_rank(6, 10), linear_full_rank_jacobian(6, 10)),
        entry(
            "linear_full_rank_large",
            L1,
            45,
            vec![1.0; 9],
            5.3999999999999993e1,
            2.2499999999999993e1,
            linear_full_rank(9, 45),
            linear_full_rank_jacobian(9, 45),
        ),
        entry("linear_rank1", L1, 10, vec![1.0; 5], 8.15e2, 3.8571428571428568e0, linear_rank1(5, 10), linear_rank1_jacobian(5, 10)),
        entry(
            "linear_rank1_zero",
            L1,
            65,
            vec![1.0; 7],
            4.0259e4,
            2.7799999999999997e1,
            linear_rank1_zero(7, 65),
            linear_rank1_zero_jacobian(7, 65),
        ),
        entry(
            "rosenbrock",
            L1,
            2,
            vec![-1.2, 1.0],
            6.5999999999999996e0,
            0.0,
            residual(|x| vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]]),
            certificate(2, 5.0, 20.0, |x| DMatrix::from_row_slice(2, 2, &[-20.0 * x[0], 10.0, -1.0, 0.0])),
        ),
        entry(
            "helical_valley",
            L1,
            3,
            vec![-1.0, 0.0, 0.0],
            5.0e1,
            4.8184774820963131e-16,
            residual(|x| {
                let mut theta = x[1].atan2(x[0]) / (2.0 * PI);
                if theta < -0.25 {
                    theta += 1.0;
                }
                vec![10.0 * (x[2] - 10.0 * theta), 10.0 * (x[0].hypot(x[1]) - 1.0), x[2]]
            }),
            None,
        ),
        entry(
            "powell_singular",
            L1,
            4,
            vec![3.0, -1.0, 0.0, 1.0],
            2.2885178618173306e1,
            4.7140220106627422e-16,
            residual(move |x| {
                vec![
                    x[0] + 10.0 * x[1],
                    s5 * (x[2] - x[3]),
                    (x[1] - 2.0 * x[2]).powi(2),
                    s10 * (x[0] - x[3]).powi(2),
                ]
            }),
            certificate(4, 5.0, 260f64.sqrt(), move |x| {
                let u = 2.0 * (x[1] - 2.0 * x[2]);
                let v = 2.0 * s10 * (x[0] - x[3]);
                #[rustfmt::skip]
                let j = DMatrix::from_row_slice(4, 4, &[
                    1.0, 10.0, 0.0, 0.0,
                    0.0, 0.0, s5, -s5,
                    0.0, u, -2.0 * u, 0.0,
                    v, 0.0, 0.0, -v,
                ]);
                j
            }),
        ),
        entry(
            "freudenstein_roth",
            L1,
            2,
            vec![0.5, -2.0],
            2.4e1,
            9.8979041902051144e0,
            residual(|x| {
                vec![
                    -13.0 + x[0] + ((5.0 - x[1]) * x[1] - 2.0) * x[1],
                    -29.0 + x[0] + ((x[1] + 1.0) * x[1] - 14.0) * x[1],
                ]
            }),
            None,
        ),
        entry(
            "bard",
            L1,
            15,
            vec![1.0; 3],
            2.1882857142857141e1,
            1.2433831572762036e-1,
            residual(|x| {
                (1..=15)
                    .map(|i| {
                        let (u, v) = (i as f64, (16 - i) as f64);
                        BARD_Y[i - 1] - (x[0] + u / (v * x[1] + u.min(v) * x[2]))
                    })
                    .collect()
            }),
            None,
        ),
        entry(
            "beale",
            L1,
            3,
            vec![1.0, 1.0],
            6.375e0,
            0.0,
            residual(|x| {
                [1.5, 2.25, 2.625]
                    .iter()
                    .zip(1..)
                    .map(|(y, i)| y - x[0] * (1.0 - x[1].powi(i)))
                    .collect()
            }),
            None,
        ),
        entry(
            "gaussian",
            L1,
            15,
            vec![0.4, 1.0, 0.0],
            5.3990015485266048e-3,
            3.3816516066159554e-4,
            residual(|x| {
                (1..=15)
                    .map(|i| {
                        let t = (8.0 - i as f64) / 2.0;
                        x[0] * (-x[1] * (t - x[2]).powi(2) / 2.0).exp() - GAUSSIAN_Y[i - 1]
                    })
                    .collect()
            }),
            None,
        ),
        entry(
            "box3d",
            L1,
            10,
            vec![0.0, 10.0, 20.0],
            9.9151186630986103e1,
            1.1102230246251565e-16,
            residual(|x| {
                (1..=10)
                    .map(|i| {
                        let t = 0.1 * i as f64;
                        (-t * x[0]).exp() - (-t * x[1]).exp() - x[2] * ((-t).exp() - (-10.0 * t).exp())
                    })
                    .collect()
            }),
            None,
        ),
        entry(
            "wood",
            L1,
            6,
            vec![-3.0, -1.0, -3.0, -1.0],
            2.1551744044572490e2,
            0.0,
            residual(move |x| {
                vec![
                    10.0 * (x[1] - x[0] * x[0]),
                    1.0 - x[0],
                    s90 * (x[3] - x[2] * x[2]),
                    1.0 - x[2],
                    s10 * (x[1] + x[3] - 2.0),
                    (x[1] - x[3]) / s10,
                ]
            }),
            certificate(4, 5.0, 20.0, move |x| {
                #[rustfmt::skip]
                let j = DMatrix::from_row_slice(6, 4, &[
                    -20.0 * x[0], 10.0, 0.0, 0.0,
                    -1.0, 0.0, 0.0, 0.0,
                    0.0, 0.0, -2.0 * s90 * x[2], s90,
                    0.0, 0.0, -1.0, 0.0,
                    0.0, s10, 0.0, s10,
                    0.0, 1.0 / s10, 0.0, -1.0 / s10,
                ]);
                j
            }),
        ),
        entry(
            "brown_dennis",
            L1,
            20,
            vec![25.0, 5.0, -5.0, -1.0],
            1.1303800557468570e4,
            9.0323433179641836e2,
            residual(brown_dennis),
            None,
        ),
        entry(
            "jennrich_sampson",
            L1,
            10,
            vec![0.3, 0.4],
            1.2058804244695882e2,
            3.2091941056553594e1,
            residual(|x| {
                (1..=10)
                    .map(|i| {
                        let t = i as f64;
                        2.0 + 2.0 * t - ((t * x[0]).exp() + (t * x[1]).exp())
                    })
                    .collect()
            }),
            None,
        ),
        entry(
            "kowalik_osborne",
            L1,
            11,
            vec![0.25, 0.39, 0.415, 0.39],
            1.9515338758928941e-1,
            3.8767973359114832e-2,
            residual(|x| {
                KOWALIK_Y
                    .iter()
                    .zip(&KOWALIK_U)
                    .map(|(y, u)| y - x[0] * (u * u + u * x[1]) / (u * u + u * x[2] + x[3]))
                    .collect()
            }),
            None,
        ),
        entry(
            "osborne1",
            L1,
            33,
            vec![0.5, 1.5, -1.0, 0.01, 0.02],
            5.3549761836014937e0,
            2.9391187567627819e-2,
            residual(|x| {
                OSBORNE1_Y
                    .iter()
                    .enumerate()
                    .map(|(i, y)| {
                        let t = 10.0 * i as f64;
                        y - (x[0] + x[1] * (-t * x[3]).exp() + x[2] * (-t * x[4]).exp())
                    })
                    .collect()
            }),
            None,
        ),
        entry(
            "brown_almost_linear",
            L1,
            7,
            vec![0.5; 7],
            2.49921875e1,
            0.0,
            residual(|x| {
                let n = x.len();
                let s: f64 = x.iter().sum();
                let mut out: Vec<f64> = x.iter().map(|xi| xi + s - (n as f64 + 1.0)).collect();
                out[n - 1] = x.iter().product::<f64>() - 1.0;
                out
            }),
            None,
        ),
        entry(
            "broyden_tridiagonal",
            L1,
            12,
            vec![-1.0; 12],
            1.5e1,
            1.0547118733938987e-14,
            residual(|x| {
                let n = x.len();
                (0..n)
                    .map(|i| {
                        let left = if i > 0 { x[i - 1] } else { 0.0 };
                        let right = if i + 1 < n { x[i + 1] } else { 0.0 };
                        (3.0 - 2.0 * x[i]) * x[i] - left - 2.0 * right + 1.0
                    })
                    .collect()
            }),
            certificate(12, 5.0, 4.0, |x| {
                let n = x.len();
                DMatrix::from_fn(n, n, |i, j| {
                    if i == j {
                        3.0 - 4.0 * x[i]
                    } else if j + 1 == i {
                        -1.0
                    } else if j == i + 1 {
                        -2.0
                    } else {
                        0.0
                    }
                })
            }),
        ),
        entry(
            "trigonometric",
            L1,
            5,
            vec![0.2; 5],
            1.9733954921001551e-1,
            1.1379786002407855e-15,
            residual(|x| {
                let n = x.len() as f64;
                let c: f64 = x.iter().map(|v| v.cos()).sum();
                x.iter()
                    .enumerate()
                    .map(|(i, v)| n - c + (i + 1) as f64 * (1.0 - v.cos()) - v.sin())
                    .collect()
            }),
            None,
        ),
        entry(
            "chebyquad",
            L1,
            8,
            (1..=8).map(|j| j as f64 / 9.0).collect(),
            3.4695258670224910e-1,
            6.8697402851299383e-2,
            residual(|x| {
                let n = x.len();
                let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
                let mut prev = vec![1.0; n];
                let mut cur = y.clone();
                let mut out = Vec::with_capacity(n);
                for i in 1..=n {
                    let integral = if i % 2 == 0 { -1.0 / ((i * i) as f64 - 1.0) } else { 0.0 };
                    out.push(cur.iter().sum::<f64>() / n as f64 - integral);
                    let next: Vec<f64> = (0..n).map(|j| 2.0 * y[j] * cur[j] - prev[j]).collect();
                    prev = std::mem::replace(&mut cur, next);
                }
                out
            }),
            None,
        ),
    ]
}

fn minimax_family() -> Vec<BenchmarkProblem> {
    use OuterKind::Minimax;
    vec![
        entry(
            "CB2",
            Minimax,
            3,
            vec![1.0, -0.1],
            5.41e0,
            1.9522244938706588e0,
            residual(|x| {
                vec![
                    x[0] * x[0] + x[1].powi(4),
                    (2.0 - x[0]).powi(2) + (2.0 - x[1]).powi(2),
                    2.0 * (x[1] - x[0]).exp(),
                ]
            }),
            None,
        ),
        entry(
            "CB3",
            Minimax,
            3,
            vec![2.0, 2.0],
            2.0e1,
            2.0,
            residual(|x| {
                vec![
                    x[0].powi(4) + x[1] * x[1],
                    (2.0 - x[0]).powi(2) + (2.0 - x[1]).powi(2),
                    2.0 * (x[1] - x[0]).exp(),
                ]
            }),
            None,
        ),
        entry(
            "DEM",
            Minimax,
            3,
            vec![1.0, 1.0],
            6.0,
            -2.9999999999999991e0,
            residual(|x| vec![5.0 * x[0] + x[1], -5.0 * x[0] + x[1], x[0] * x[0] + x[1] * x[1] + 4.0 * x[1]]),
            certificate(2, 10.0, 2.0, |x| {
                DMatrix::from_row_slice(3, 2, &[5.0, 1.0, -5.0, 1.0, 2.0 * x[0], 2.0 * x[1] + 4.0])
            }),
        ),
        entry(
            "QL",
            Minimax,
            3,
            vec![-1.0, 5.0],
            5.6e1,
            7.1999999999999984e0,
            residual(|x| {
                let q = x[0] * x[0] + x[1] * x[1];
                vec![q, q + 10.0 * (-4.0 * x[0] - x[1] + 4.0), q + 10.0 * (-x[0] - 2.0 * x[1] + 6.0)]
            }),
            certificate(2, 10.0, 2.0 * 3f64.sqrt(), |x| {
                let (a, b) = (2.0 * x[0], 2.0 * x[1]);
                DMatrix::from_row_slice(3, 2, &[a, b, a - 40.0, b - 10.0, a - 10.0, b - 20.0])
            }),
        ),
        entry(
            "LQ",
            Minimax,
            2,
            vec![-0.5, -0.5],
            1.0,
            -std::f64::consts::SQRT_2,
            residual(|x| vec![-x[0] - x[1], -x[0] - x[1] + (x[0] * x[0] + x[1] * x[1] - 1.0)]),
            certificate(2, 10.0, 2.0, |x| {
                DMatrix::from_row_slice(2, 2, &[-1.0, -1.0, -1.0 + 2.0 * x[0], -1.0 + 2.0 * x[1]])
            }),
        ),
        entry(
            "Mifflin1",
            Minimax,
            2,
            vec![0.8, 0.6],
            -8.0000000000000004e-1,
            -1.0,
            residual(|x| vec![-x[0], -x[0] + 20.0 * (x[0] * x[0] + x[1] * x[1] - 1.0)]),
            certificate(2, 10.0, 40.0, |x| {
                DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, -1.0 + 40.0 * x[0], 40.0 * x[1]])
            }),
        ),
        entry(
            "Mifflin2",
            Minimax,
            2,
            vec![-1.0, -1.0],
            4.75,
            -1.0,
            residual(|x| {
                let q = x[0] * x[0] + x[1] * x[1] - 1.0;
                vec![-x[0] + 3.75 * q, -x[0] + 0.25 * q]
            }),
            certificate(2, 10.0, 56.5f64.sqrt(), |x| {
                DMatrix::from_row_slice(2, 2, &[-1.0 + 7.5 * x[0], 7.5 * x[1], -1.0 + 0.5 * x[0], 0.5 * x[1]])
            }),
        ),
        entry(
            "WF",
            Minimax,
            3,
            vec![3.0, 1.0],
            7.3387096774193550e0,
            9.5528416958170584e-28,
            residual(|x| {
                let r = 10.0 * x[0] / (x[0] + 0.1);
                let s = 2.0 * x[1] * x[1];
                vec![0.5 * (x[0] + r + s), 0.5 * (-x[0] + r + s), 0.5 * (x[0] - r + s)]
            }),
            None,
        ),
        entry(
            "RosenSuzuki",
            Minimax,
            4,
            vec![0.0; 4],
            0.0,
            -4.4000000000000007e1,
            residual(|x| {
                let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
                let f1 = a * a + b * b + 2.0 * c * c + d * d - 5.0 * a - 5.0 * b - 21.0 * c + 7.0 * d;
                let f2 = a * a + b * b + c * c + d * d + a - b + c - d - 8.0;
                let f3 = a * a + 2.0 * b * b + c * c + 2.0 * d * d - a - d - 10.0;
                let f4 = a * a + b * b + c * c + 2.0 * a - b - d - 5.0;
                vec![f1, f1 + 10.0 * f2, f1 + 10.0 * f3, f1 + 10.0 * f4]
            }),
            certificate(4, 10.0, 2932f64.sqrt(), |x| {
                let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
                let g1 = [2.0 * a - 5.0, 2.0 * b - 5.0, 4.0 * c - 21.0, 2.0 * d + 7.0];
                let g2 = [2.0 * a + 1.0, 2.0 * b - 1.0, 2.0 * c + 1.0, 2.0 * d - 1.0];
                let g3 = [2.0 * a - 1.0, 4.0 * b, 2.0 * c, 4.0 * d - 1.0];
                let g4 = [2.0 * a + 2.0, 2.0 * b - 1.0, 2.0 * c, -1.0];
                DMatrix::from_fn(4, 4, |i, j| match i {
                    0 => g1[j],
                    1 => g1[j] + 10.0 * g2[j],
                    2 => g1[j] + 10.0 * g3[j],
                    _ => g1[j] + 10.0 * g4[j],
                })
            }),
        ),
        entry(
            "MAXQ",
            Minimax,
            10,
            signed_ramp(10),
            1.0e2,
            4.3468858382878218e-18,
            residual(|x| x.iter().map(|v| v * v).collect()),
            certificate(10, 20.0, 2.0, |x| DMatrix::from_fn(x.len(), x.len(), |i, j| if i == j { 2.0 * x[i] } else { 0.0 })),
        ),
        entry(
            "MAXL",
            Minimax,
            20,
            signed_ramp(10),
            1.0e1,
            5.5511151226814962e-17,
            residual(|x| x.iter().copied().chain(x.iter().map(|v| -v)).collect()),
            None,
        ),
        entry(
            "Davidon2",
            Minimax,
            40,
            vec![25.0, 5.0, -5.0, -1.0],
            8.2227775685100642e2,
            1.1570643952100676e2,
            residual(|x| {
                let r = brown_dennis(x);
                r.iter().copied().chain(r.iter().map(|v| -v)).collect()
            }),
            None,
        ),
        entry(
            "Goffin",
            Minimax,
            50,
            (1..=50).map(|i| i as f64 - 25.5).collect(),
            1.225e3,
            2.1316282072803006e-14,
            residual(|x| {
                let s: f64 = x.iter().sum();
                x.iter().map(|v| 50.0 * v - s).collect()
            }),
            None,
        ),
    ]
}

/// Every benchmark problem, L1 family first.
pub fn registry() -> Vec<BenchmarkProblem> {
    let mut all = l1_family();
    all.extend(minimax_family());
    all
}

pub fn find(name: &str) -> Option<BenchmarkProblem> {
    registry().into_iter().find(|p| p.name == name)
}

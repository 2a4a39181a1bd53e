//! Derivative-free trust-region method for composite problems `min h(F(x))` over
//! polyhedral sets, with forward-difference Jacobians and LP subproblems.

pub mod campaign;
pub mod config;
pub mod diagnostics;
pub mod driver;
pub mod fd;
pub mod lp;
pub mod norms;
pub mod oracle;
pub mod outer;
pub mod problem;
pub mod profile;
pub mod subproblem;
pub mod testset;

pub use driver::{
    compute_rho, solve, EvalBudget, IterationClass, IterationSnapshot, ResolvedParams, Rho, RunRecord, Termination,
    TrfdParams,
};
pub use fd::{build_jacobian, JacobianModel};
pub use norms::{norm_constants, NormConstants, PNorm, MACHINE_EPS};
pub use oracle::{BlackBoxOracle, Evaluate, OracleError};
pub use outer::{OuterFunction, OuterKind};
pub use problem::{FeasibleRegion, Problem};
pub use subproblem::{solve_tr_subproblem, SubproblemSolution};

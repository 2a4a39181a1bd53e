//! Runs every (problem, solver) pair of a campaign and writes traces, a summary and data profiles.
//!
//! Output layout:
//!
//! ```text
//! <out>/traces/<solver>__<problem>.json
//! <out>/summary.csv
//! <out>/data_profile_<tol>.csv      one per tolerance, e.g. data_profile_1e-3.csv
//! ```

use crate::config::{CampaignConfig, ConfigError, ProblemConfig, SolverConfig};
use crate::driver::{solve, EvalBudget, RunRecord, Termination};
use crate::profile::{data_profile, emit_profile_csv, DataProfile, ProfileError};
use crate::testset::BenchmarkProblem;
use rayon::prelude::*;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CampaignError + '_ {
    move |source| CampaignError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Where a campaign problem comes from.
#[derive(Debug, Clone)]
pub enum ProblemSource {
    Registry(BenchmarkProblem),
    File(ProblemConfig),
}

impl ProblemSource {
    pub fn name(&self) -> &str {
        match self {
            ProblemSource::Registry(p) => p.name,
            ProblemSource::File(c) => &c.name,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            ProblemSource::Registry(p) => (p.n, p.m),
            ProblemSource::File(c) => (c.n, c.m),
        }
    }

    pub fn f_ref(&self) -> Option<f64> {
        match self {
            ProblemSource::Registry(p) => Some(p.f_ref),
            ProblemSource::File(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Campaign {
    pub problems: Vec<ProblemSource>,
    pub solvers: Vec<SolverConfig>,
    pub budget: EvalBudget,
    pub tolerances: Vec<f64>,
    pub jobs: usize,
}

impl Campaign {
    pub fn from_config(c: &CampaignConfig) -> Result<Self, ConfigError> {
        c.validate()?;
        let mut problems: Vec<ProblemSource> = c.registry_selection()?.into_iter().map(ProblemSource::Registry).collect();
        for path in &c.problem_files {
            problems.push(ProblemSource::File(ProblemConfig::load(path)?));
        }
        let mut names: Vec<&str> = problems.iter().map(|p| p.name()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(ConfigError::Invalid("problem names must be unique".into()));
        }
        Ok(Campaign {
            problems,
            solvers: c.solvers.clone(),
            budget: EvalBudget::new(c.budget),
            tolerances: c.tolerances.clone(),
            jobs: c.jobs.max(1),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub solver: String,
    pub problem: String,
    pub n: usize,
    pub m: usize,
    pub p: String,
    pub f0: Option<f64>,
    pub final_f: Option<f64>,
    pub f_ref: Option<f64>,
    pub evals: u64,
    pub iterations: usize,
    pub termination: String,
    pub message: String,
}

#[derive(Debug)]
pub struct CampaignOutcome {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub profiles: Vec<DataProfile>,
}

impl CampaignOutcome {
    /// `true` when no run ended in OracleError or NumericalTrouble.
    pub fn all_clean(&self) -> bool {
        self.summary.iter().all(|r| r.termination != Termination::OracleError.to_string() && r.termination != Termination::NumericalTrouble.to_string())
    }
}

pub fn trace_file_name(solver: &str, problem: &str) -> String {
    format!("{solver}__{problem}.json")
}

pub fn profile_file_name(tolerance: f64) -> String {
    format!("data_profile_{tolerance:e}.csv")
}

/// A record for runs that could not start, so every pair still has a row and a trace.
fn failed_record(src: &ProblemSource, solver: &SolverConfig, budget: EvalBudget, message: String) -> RunRecord {
    use crate::driver::{ResolvedParams, SCHEMA_VERSION};
    use crate::norms::norm_constants;
    use crate::outer::OuterFunction;
    let (n, m) = src.dims();
    let kind = match src {
        ProblemSource::Registry(p) => p.family,
        ProblemSource::File(c) => c.h,
    };
    let params = solver.params(n, m, budget);
    let h = OuterFunction::new(kind, m);
    let rp = params.resolve(n, m, &h).unwrap_or_else(|_| ResolvedParams {
        epsilon: params.epsilon,
        alpha: params.alpha,
        theta: params.theta,
        sigma: 0.0,
        tau0: 0.0,
        delta0: 0.0,
        delta_star: params.delta_star,
        p: params.p,
        lipschitz_h: h.lipschitz(params.p),
        consts: norm_constants(params.p, n, m),
        stop_delta: params.stop_delta,
        stop_eta: params.stop_eta,
        simplex_gradients: budget.simplex_gradients,
        max_evals: budget.max_evaluations(n),
    });
    RunRecord {
        schema_version: SCHEMA_VERSION,
        solver: solver.name.clone(),
        problem: src.name().to_string(),
        n,
        m,
        outer: kind,
        final_tau: rp.tau0,
        final_delta: rp.delta0,
        params: rp,
        iterations: Vec::new(),
        iterates: Vec::new(),
        best_f: Vec::new(),
        trailing_evals: 0,
        total_evals: 0,
        termination: Termination::OracleError,
        message: Some(message),
        final_x: Vec::new(),
        final_f: None,
    }
}

/// Runs one (problem, solver) pair from a fresh oracle.
pub fn run_one(src: &ProblemSource, solver: &SolverConfig, budget: EvalBudget) -> RunRecord {
    let built = match src {
        ProblemSource::Registry(p) => Ok(p.problem()),
        ProblemSource::File(c) => c.build(),
    };
    let mut problem = match built {
        Ok(p) => p,
        Err(e) => return failed_record(src, solver, budget, e.to_string()),
    };
    let params = solver.params(problem.n, problem.m, budget);
    match solve(&mut problem, &params) {
        Ok(mut r) => {
            r.solver = solver.name.clone();
            r
        }
        Err(e) => {
            let mut r = failed_record(src, solver, budget, e.to_string());
            r.termination = Termination::NumericalTrouble;
            r
        }
    }
}

fn summary_row(r: &RunRecord, f_ref: Option<f64>) -> SummaryRow {
    SummaryRow {
        solver: r.solver.clone(),
        problem: r.problem.clone(),
        n: r.n,
        m: r.m,
        p: r.params.p.to_string(),
        f0: r.f0(),
        final_f: r.final_f,
        f_ref,
        evals: r.total_evals,
        iterations: r.iterations.len(),
        termination: r.termination.to_string(),
        message: r.message.clone().unwrap_or_default(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String, CampaignError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "solver", "problem", "n", "m", "p", "f0", "final_f", "f_ref", "evals", "iterations", "termination", "message",
    ])?;
    for r in rows {
        w.write_record([
            r.solver.clone(),
            r.problem.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.p.clone(),
            opt(r.f0),
            opt(r.final_f),
            opt(r.f_ref),
            r.evals.to_string(),
            r.iterations.to_string(),
            r.termination.clone(),
            r.message.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CampaignError::Io {
        path: PathBuf::from("summary.csv"),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Runs the campaign; with `out` set, writes every artifact below it.
///
/// Runs may execute concurrently; results are collected in (problem, solver)
/// order and written by this thread only.
pub fn run_campaign(c: &Campaign, out: Option<&Path>) -> Result<CampaignOutcome, CampaignError> {
    let pairs: Vec<(usize, usize)> = (0..c.problems.len())
        .flat_map(|p| (0..c.solvers.len()).map(move |s| (p, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.jobs.max(1))
        .build()
        .map_err(|e| CampaignError::Pool(e.to_string()))?;
    let records: Vec<RunRecord> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(p, s)| run_one(&c.problems[p], &c.solvers[s], c.budget))
            .collect()
    });

    let summary: Vec<SummaryRow> = pairs
        .iter()
        .zip(&records)
        .map(|(&(p, _), r)| summary_row(r, c.problems[p].f_ref()))
        .collect();
    let profiles = c
        .tolerances
        .iter()
        .map(|&tol| data_profile(&records, tol, c.budget.simplex_gradients))
        .collect::<Result<Vec<_>, _>>()?;

    if let Some(dir) = out {
        let traces = dir.join("traces");
        std::fs::create_dir_all(&traces).map_err(io_err(&traces))?;
        for r in &records {
            let path = traces.join(trace_file_name(&r.solver, &r.problem));
            r.write(&path).map_err(io_err(&path))?;
        }
        let path = dir.join("summary.csv");
        std::fs::write(&path, summary_csv(&summary)?).map_err(io_err(&path))?;
        for dp in &profiles {
            emit_profile_csv(dp, &dir.join(profile_file_name(dp.tolerance)))?;
        }
    }
    Ok(CampaignOutcome {
        records,
        summary,
        profiles,
    })
}

/// Reads every `*.json` trace below `dir`, sorted by file name.
pub fn load_traces(dir: &Path) -> Result<Vec<RunRecord>, CampaignError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| RunRecord::read(p).map_err(io_err(p)))
        .collect()
}

//! Data profiles over groups of run records.
//!
//! A solver solves a problem at evaluation `t` once its best value satisfies
//! `f(x₀) − f_t ≥ (1 − tol)(f(x₀) − f_best)`, where `f_best` is the smallest
//! value any solver found on that problem. The curve at κ is the fraction of
//! problems solved within `κ(n + 1)` evaluations.

use crate::driver::RunRecord;
use std::collections::BTreeMap;
use std::io;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("no records to profile")]
    EmptyGroup,
    #[error("solver {solver} has no record for problem {problem}")]
    MissingRecord { solver: String, problem: String },
    #[error("duplicate record for solver {solver} on problem {problem}")]
    DuplicateRecord { solver: String, problem: String },
    #[error("malformed profile CSV: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataProfile {
    pub tolerance: f64,
    pub budget: u64,
    pub solvers: Vec<String>,
    pub problems: Vec<String>,
    /// Smallest best-f over all solvers, per problem.
    pub f_best: Vec<f64>,
    /// `solved_at[s][p]`: first evaluation count at which solver `s` solved problem `p`.
    pub solved_at: Vec<Vec<Option<u64>>>,
    /// `curves[s][κ]` for κ = 0..=budget.
    pub curves: Vec<Vec<f64>>,
}

impl DataProfile {
    /// Fraction of problems solved by `solver` within the whole budget.
    pub fn final_fraction(&self, solver: usize) -> f64 {
        *self.curves[solver].last().expect("curves have budget + 1 points")
    }
}

/// First 1-based evaluation count at which the test passes.
fn first_solved(best_f: &[f64], f0: f64, f_best: f64, tol: f64) -> Option<u64> {
    let target = (1.0 - tol) * (f0 - f_best);
    best_f.iter().position(|&b| f0 - b >= target).map(|i| i as u64 + 1)
}

/// Profiles `records`, which must hold exactly one record per (solver, problem).
///
/// Solvers and problems are ordered by first appearance.
pub fn data_profile(records: &[RunRecord], tolerance: f64, budget: u64) -> Result<DataProfile, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::EmptyGroup);
    }
    let mut solvers: Vec<String> = Vec::new();
    let mut problems: Vec<String> = Vec::new();
    let mut dims: Vec<usize> = Vec::new();
    for r in records {
        if !solvers.contains(&r.solver) {
            solvers.push(r.solver.clone());
        }
        if !problems.contains(&r.problem) {
            problems.push(r.problem.clone());
            dims.push(r.n);
        }
    }
    let mut table: BTreeMap<(usize, usize), &RunRecord> = BTreeMap::new();
    for r in records {
        let s = solvers.iter().position(|x| *x == r.solver).unwrap();
        let p = problems.iter().position(|x| *x == r.problem).unwrap();
        if table.insert((s, p), r).is_some() {
            return Err(ProfileError::DuplicateRecord {
                solver: r.solver.clone(),
                problem: r.problem.clone(),
            });
        }
    }
    for s in 0..solvers.len() {
        for p in 0..problems.len() {
            if !table.contains_key(&(s, p)) {
                return Err(ProfileError::MissingRecord {
                    solver: solvers[s].clone(),
                    problem: problems[p].clone(),
                });
            }
        }
    }

    let mut f_best = vec![f64::INFINITY; problems.len()];
    let mut f0 = vec![f64::NAN; problems.len()];
    for (&(_, p), r) in &table {
        if let Some(&last) = r.best_f.last() {
            f_best[p] = f_best[p].min(last);
        }
        if let Some(first) = r.f0() {
            f0[p] = first;
        }
    }

    let mut solved_at = vec![vec![None; problems.len()]; solvers.len()];
    for (&(s, p), r) in &table {
        if f0[p].is_finite() && f_best[p].is_finite() {
            solved_at[s][p] = first_solved(&r.best_f, f0[p], f_best[p], tolerance);
        }
    }

    let np = problems.len() as f64;
    let curves = solved_at
        .iter()
        .map(|row| {
            (0..=budget)
                .map(|kappa| {
                    let solved = row
                        .iter()
                        .zip(&dims)
                        .filter(|(t, &n)| matches!(t, Some(t) if *t <= kappa * (n as u64 + 1)))
                        .count();
                    solved as f64 / np
                })
                .collect()
        })
        .collect();

    Ok(DataProfile {
        tolerance,
        budget,
        solvers,
        problems,
        f_best,
        solved_at,
        curves,
    })
}

/// Renders `kappa,<solver>...` rows for κ = 0..=budget.
pub fn profile_csv(dp: &DataProfile) -> Result<String, ProfileError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["kappa".to_string()];
    header.extend(dp.solvers.iter().cloned());
    w.write_record(&header)?;
    for kappa in 0..=dp.budget as usize {
        let mut row = vec![kappa.to_string()];
        row.extend(dp.curves.iter().map(|c| c[kappa].to_string()));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| ProfileError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn emit_profile_csv(dp: &DataProfile, path: &Path) -> Result<(), ProfileError> {
    std::fs::write(path, profile_csv(dp)?)?;
    Ok(())
}

/// Parsed profile CSV: solver names and `curves[s][κ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub solvers: Vec<String>,
    pub curves: Vec<Vec<f64>>,
}

pub fn parse_profile_csv(text: &str) -> Result<ProfileTable, ProfileError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    if header.get(0) != Some("kappa") {
        return Err(ProfileError::Malformed("first column must be kappa".into()));
    }
    let solvers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut curves = vec![Vec::new(); solvers.len()];
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let kappa: usize = row[0]
            .parse()
            .map_err(|_| ProfileError::Malformed(format!("bad kappa {:?}", &row[0])))?;
        if kappa != i {
            return Err(ProfileError::Malformed(format!("row {i} has kappa {kappa}")));
        }
        for (s, cell) in row.iter().skip(1).enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| ProfileError::Malformed(format!("bad value {cell:?}")))?;
            curves[s].push(v);
        }
    }
    Ok(ProfileTable { solvers, curves })
}

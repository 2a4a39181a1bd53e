//! Acceptance criteria, one line each. Exits nonzero if any criterion fails.

mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};
use support::*;
use trfd_core::campaign::{run_campaign, Campaign, ProblemSource};
use trfd_core::config::{SolverConfig, DEFAULT_TOLERANCES};
use trfd_core::diagnostics::{
    audit_trace, eta_bruteforce, fd_rounding_bound, psi, AnalyticProblem, GRID_RESOLUTION,
};
use trfd_core::driver::{Entry, IterationClass, RunRecord, Termination};
use trfd_core::lp::solve_lp;
use trfd_core::testset::{self, BenchmarkProblem};
use trfd_core::{solve, solve_tr_subproblem, EvalBudget, OuterFunction, OuterKind, PNorm, TrfdParams};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c2p(p: PNorm, n: usize) -> f64 {
    match p {
        PNorm::One => 1.0,
        PNorm::Two => 1.0,
        PNorm::Infinity => (n as f64).sqrt(),
    }
}

fn cp2(p: PNorm, m: usize) -> f64 {
    match p {
        PNorm::One => (m as f64).sqrt(),
        PNorm::Two => 1.0,
        PNorm::Infinity => 1.0,
    }
}

fn l_h(kind: OuterKind, p: PNorm, m: usize) -> f64 {
    match (kind, p) {
        (OuterKind::Minimax, _) => 1.0,
        (OuterKind::L1, PNorm::One) => 1.0,
        (OuterKind::L1, PNorm::Two) => (m as f64).sqrt(),
        (OuterKind::L1, PNorm::Infinity) => m as f64,
    }
}

fn family_solver(kind: OuterKind) -> SolverConfig {
    match kind {
        OuterKind::L1 => SolverConfig::trfd_l1(),
        OuterKind::Minimax => SolverConfig::trfd_m(),
    }
}

fn family_campaign(kind: OuterKind, jobs: usize) -> Campaign {
    Campaign {
        problems: testset::registry()
            .into_iter()
            .filter(|p| p.family == kind)
            .map(ProblemSource::Registry)
            .collect(),
        solvers: vec![family_solver(kind)],
        budget: EvalBudget::new(100),
        tolerances: DEFAULT_TOLERANCES.to_vec(),
        jobs,
    }
}

fn registry_runs() -> Vec<(BenchmarkProblem, RunRecord)> {
    testset::registry()
        .into_par_iter()
        .map(|bp| {
            let params = family_solver(bp.family).params(bp.n, bp.m, EvalBudget::new(100));
            let r = solve(&mut bp.problem(), &params).expect("registry parameters resolve");
            (bp, r)
        })
        .collect()
}

fn random_instances(count: usize, seed: u64) -> Vec<(AnalyticProblem, PNorm)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let kind = random_kind(&mut rng);
            let p = random_norm(&mut rng);
            let n = rng.random_range(2..=4);
            let m = rng.random_range(1..=5);
            (random_quadratic(&mut rng, kind, n, m, 1.0), p)
        })
        .collect()
}

fn run_analytic(ap: &AnalyticProblem, p: PNorm, budget: u64) -> RunRecord {
    let mut params = TrfdParams::with_norm(p);
    params.budget = EvalBudget::new(budget);
    solve(&mut ap.problem().unwrap(), &params).unwrap()
}

/// η sign, the ψ-η gap bound, η monotonicity in the radius and τ√n ≤ Δ on every benchmark run and 200 random instances.
fn criterion_1() -> Outcome {
    let mut violations: Vec<String> = Vec::new();
    let mut snapshots = 0usize;
    let mut gaps = 0usize;
    // Literal bound, and the bound plus the forward-difference rounding allowance.
    let mut gaps_over_bound = 0usize;
    let mut rounding_violations = 0usize;

    let runs = registry_runs();
    for (bp, r) in &runs {
        for s in &r.iterations {
            snapshots += 1;
            if !(s.eta_star >= 0.0) {
                violations.push(format!("{} k={}: η < 0", bp.name, s.k));
            }
            if !(s.tau * (r.n as f64).sqrt() <= s.delta) {
                violations.push(format!("{} k={}: τ√n > Δ", bp.name, s.k));
            }
        }
        match audit_trace(r, bp.analytic().as_ref()) {
            Ok(rep) => {
                gaps += rep.gap_checked;
                let over = rep.gap_checked - rep.gap_exact_only;
                if over > 0 {
                    gaps_over_bound += over;
                    violations.push(format!("{}: {over} gaps above the bound", bp.name));
                }
            }
            Err(e) => {
                rounding_violations += 1;
                violations.push(format!("{}: {e}", bp.name));
            }
        }
    }

    let instances = random_instances(200, 11);
    let results: Vec<(Vec<String>, usize, usize, usize, usize)> = instances
        .par_iter()
        .enumerate()
        .map(|(i, (ap, p))| {
            let mut v = Vec::new();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i as u64);
            let (n, m) = (ap.n(), ap.m());
            let (mut g, mut gr, mut rv) = (0, 0, 0);
            for _ in 0..3 {
                let x = uniform(&mut rng, n, -2.0, 2.0);
                let f_x = ap.residual_at(&x);
                for tau in [1e-2, 1e-4, f64::EPSILON.sqrt()] {
                    let a = ap.fd_jacobian(&x, tau);
                    let r1 = rng.random_range(0.05..2.0);
                    let r2 = r1 * rng.random_range(1.0..20.0);
                    let e1 = solve_tr_subproblem(&ap.h, &f_x, &a, &ap.region, &x, *p, r1).unwrap().eta;
                    let e2 = solve_tr_subproblem(&ap.h, &f_x, &a, &ap.region, &x, *p, r2).unwrap().eta;
                    if !(e1 >= 0.0 && e2 >= 0.0) {
                        v.push(format!("{} #{i}: η < 0", ap.name));
                    }
                    if e1 < e2 - 1e-9 {
                        v.push(format!("{} #{i}: η({r1}) = {e1} < η({r2}) = {e2}", ap.name));
                    }
                    let ps = psi(ap, &x, *p, r1).unwrap();
                    let scale = l_h(ap.h.kind, *p, m) * cp2(*p, m) * c2p(*p, n);
                    let bound = scale * ap.lipschitz_j * (n as f64).sqrt() * tau / 2.0;
                    let rounding = scale * fd_rounding_bound(ap, &x, tau);
                    let gap = (ps - e1).abs();
                    g += 1;
                    if gap > bound * (1.0 + 1e-6) {
                        gr += 1;
                        v.push(format!("{} #{i} τ={tau:e}: |ψ − η| = {gap:e} > {bound:e}", ap.name));
                    }
                    if gap > (bound + rounding) * (1.0 + 1e-6) {
                        rv += 1;
                    }
                }
            }
            let rec = run_analytic(ap, *p, 30);
            let mut snaps = 0;
            for s in &rec.iterations {
                snaps += 1;
                if !(s.tau * (n as f64).sqrt() <= s.delta) || !(s.eta_star >= 0.0) {
                    v.push(format!("{} #{i} k={}: trace invariant", ap.name, s.k));
                }
            }
            match audit_trace(&rec, Some(ap)) {
                Ok(rep) => {
                    let over = rep.gap_checked - rep.gap_exact_only;
                    g += rep.gap_checked;
                    gr += over;
                    if over > 0 {
                        v.push(format!("{} #{i}: {over} trace gaps above the bound", ap.name));
                    }
                }
                Err(e) => {
                    rv += 1;
                    v.push(format!("{} #{i}: {e}", ap.name));
                }
            }
            (v, g, gr, rv, snaps)
        })
        .collect();
    for (v, g, gr, rv, snaps) in results {
        violations.extend(v);
        gaps += g;
        gaps_over_bound += gr;
        rounding_violations += rv;
        snapshots += snaps;
    }
    outcome(
        violations.is_empty(),
        format!(
            "{} runs + 200 random instances, {snapshots} trace steps, {gaps} ψ-η gaps, {gaps_over_bound} above the bound ({rounding_violations} still above it with the forward-difference rounding allowance), {} violations{}",
            runs.len(),
            violations.len(),
            violations.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    )
}

/// LP subproblem against the grid oracle and the bundled simplex against vertex enumeration.
fn criterion_2() -> Outcome {
    let combos = [
        (OuterKind::L1, PNorm::One),
        (OuterKind::L1, PNorm::Infinity),
        (OuterKind::Minimax, PNorm::One),
        (OuterKind::Minimax, PNorm::Infinity),
    ];
    let cases: Vec<(usize, usize)> = (0..4).flat_map(|c| (0..100).map(move |i| (c, i))).collect();
    let grid: Vec<Result<f64, String>> = cases
        .par_iter()
        .map(|&(c, i)| {
            let (kind, p) = combos[c];
            let mut rng = ChaCha8Rng::seed_from_u64((c * 1000 + i) as u64);
            let m = rng.random_range(1..=4);
            let f_x = uniform(&mut rng, m, -1.0, 1.0);
            let a = nalgebra::DMatrix::from_fn(m, 2, |_, _| rng.random_range(-2.0..2.0));
            let r = rng.random_range(0.2..1.0);
            let h = OuterFunction::new(kind, m);
            let region = trfd_core::FeasibleRegion::unconstrained(2);
            let x = [0.0, 0.0];
            let lp = solve_tr_subproblem(&h, &f_x, &a, &region, &x, p, r).map_err(|e| e.to_string())?;
            let eta_grid = eta_bruteforce(&h, &f_x, &a, &region, &x, p, r, GRID_RESOLUTION).map_err(|e| e.to_string())?;
            let model_grid = h.eval(&f_x) - r * eta_grid;
            let tol = 2.0 * GRID_RESOLUTION * (1.0 + spectral_norm(&a));
            let diff = (lp.model_value - model_grid).abs();
            if diff > tol || lp.model_value > model_grid + 1e-9 {
                return Err(format!("{kind:?}/{p} #{i}: LP {} vs grid {model_grid}", lp.model_value));
            }
            Ok(diff / tol)
        })
        .collect();
    let lps: Vec<Result<f64, String>> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(50_000 + i);
            let vars = rng.random_range(2..=7);
            let rows = rng.random_range(1..=(12 - vars).min(5));
            let lp = random_lp(&mut rng, vars, rows);
            let want = lp_vertex_enumeration(&lp).ok_or(format!("LP #{i}: no vertex"))?;
            let got = solve_lp(&lp).map_err(|e| format!("LP #{i}: {e}"))?.objective;
            if (got - want).abs() > 1e-8 {
                return Err(format!("LP #{i}: simplex {got} vs enumeration {want}"));
            }
            Ok((got - want).abs())
        })
        .collect();
    let errors: Vec<&String> = grid.iter().chain(&lps).filter_map(|r| r.as_ref().err()).collect();
    let worst_grid = grid.iter().filter_map(|r| r.as_ref().ok()).fold(0.0f64, |a, &b| a.max(b));
    let worst_lp = lps.iter().filter_map(|r| r.as_ref().ok()).fold(0.0f64, |a, &b| a.max(b));
    outcome(
        errors.is_empty(),
        format!(
            "400 grid comparisons (worst {:.3} of tolerance), 100 LPs (worst {worst_lp:e}), {} mismatches{}",
            worst_grid,
            errors.len(),
            errors.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    )
}

fn sample_box(rng: &mut ChaCha8Rng, ap: &AnalyticProblem) -> Vec<f64> {
    (0..ap.n())
        .map(|j| {
            let lo = ap.lj_lower[j].max(-5.0);
            let hi = ap.lj_upper[j].min(5.0);
            rng.random_range(lo..hi)
        })
        .collect()
}

/// Forward-difference error bound and its first-order slope.
fn criterion_3() -> Outcome {
    let taus = [1e-2, 1e-4, 1e-6];
    let mut violations = Vec::new();
    let mut slopes = Vec::new();
    let mut affine = 0;
    let mut measured = 0;
    let mut rounding_violations = 0;
    for bp in testset::registry() {
        let Some(ap) = bp.analytic() else { continue };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut mean = [0.0; 3];
        for _ in 0..20 {
            let x = sample_box(&mut rng, &ap);
            let j = ap.jacobian_at(&x);
            for (t, &tau) in taus.iter().enumerate() {
                let err = spectral_norm(&(ap.fd_jacobian(&x, tau) - &j));
                let bound = ap.lipschitz_j * (ap.n() as f64).sqrt() * tau / 2.0;
                measured += 1;
                let limit = bound * (1.0 + 1e-6);
                if err > limit {
                    violations.push(format!("{} τ={tau:e}: {err:e} > {limit:e}", bp.name));
                    if err > limit + fd_rounding_bound(&ap, &x, tau) {
                        rounding_violations += 1;
                    }
                }
                mean[t] += err / 20.0;
            }
        }
        if ap.lipschitz_j == 0.0 {
            affine += 1;
            continue;
        }
        // Least-squares slope of log error against log τ.
        let lx: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
        let ly: Vec<f64> = mean.iter().map(|e| e.ln()).collect();
        let (mx, my) = (lx.iter().sum::<f64>() / 3.0, ly.iter().sum::<f64>() / 3.0);
        let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        if !(0.8..=1.2).contains(&slope) {
            violations.push(format!("{}: slope {slope:.3}", bp.name));
        }
        slopes.push((bp.name, slope));
    }
    let (lo, hi) = slopes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, s)| (a.min(*s), b.max(*s)));
    outcome(
        violations.is_empty() && !slopes.is_empty(),
        format!(
            "{} curved problems (slopes {lo:.3}..{hi:.3}), {affine} affine problems, {measured} measurements, {} violations ({rounding_violations} beyond the forward-difference rounding allowance){}",
            slopes.len(),
            violations.len(),
            violations.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    )
}

/// ψ_{2,r} equals the gradient norm for smooth scalar problems.
fn criterion_4() -> Outcome {
    use nalgebra::DMatrix;
    use std::sync::Arc;
    let rosenbrock = AnalyticProblem {
        name: "rosenbrock_scalar".into(),
        h: OuterFunction::minimax(1),
        region: trfd_core::FeasibleRegion::unconstrained(2),
        x0: vec![-1.2, 1.0],
        residual: Arc::new(|x: &[f64]| vec![100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)]),
        jacobian: Arc::new(|x: &[f64]| {
            DMatrix::from_row_slice(
                1,
                2,
                &[-400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]), 200.0 * (x[1] - x[0] * x[0])],
            )
        }),
        lipschitz_j: f64::INFINITY,
        lj_lower: vec![-2.0; 2],
        lj_upper: vec![2.0; 2],
        f_star: Some(0.0),
        term_magnitude: None,
    };
    let trig = AnalyticProblem {
        name: "sin_exp".into(),
        h: OuterFunction::minimax(1),
        region: trfd_core::FeasibleRegion::unconstrained(3),
        x0: vec![0.0; 3],
        residual: Arc::new(|x: &[f64]| vec![x[0].sin() * x[1].exp() + x[2] * x[2]]),
        jacobian: Arc::new(|x: &[f64]| {
            DMatrix::from_row_slice(1, 3, &[x[0].cos() * x[1].exp(), x[0].sin() * x[1].exp(), 2.0 * x[2]])
        }),
        lipschitz_j: f64::INFINITY,
        lj_lower: vec![-2.0; 3],
        lj_upper: vec![2.0; 3],
        f_star: None,
        term_magnitude: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut problems = vec![rosenbrock, trig];
    for n in 2..=4 {
        problems.push(random_quadratic(&mut rng, OuterKind::Minimax, n, 1, 1.0));
    }
    let mut worst = 0.0f64;
    let mut checks = 0;
    for ap in &problems {
        for _ in 0..20 {
            let x = uniform(&mut rng, ap.n(), -2.0, 2.0);
            let r = rng.random_range(0.1..10.0);
            let g = ap.jacobian_at(&x);
            let want = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let got = psi(ap, &x, PNorm::Two, r).unwrap();
            worst = worst.max((got - want).abs() / want);
            checks += 1;
        }
    }
    outcome(
        worst <= 1e-10,
        format!("{checks} points on {} problems, worst relative error {worst:e}", problems.len()),
    )
}

/// Desk-scale convergence over both registry families.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for (kind, need) in [(OuterKind::L1, 0.8), (OuterKind::Minimax, 0.7)] {
        let c = family_campaign(kind, 4);
        let out = run_campaign(&c, None).unwrap();
        let dp = out.profiles.iter().find(|d| d.tolerance == 1e-3).unwrap();
        let own = dp.final_fraction(0);
        let mut by_ref = 0;
        let mut floor_breaks = Vec::new();
        for row in &out.summary {
            let (f0, ff, fr) = (row.f0.unwrap(), row.final_f.unwrap_or(f64::NAN), row.f_ref.unwrap());
            if f0 - ff >= (1.0 - 1e-3) * (f0 - fr) {
                by_ref += 1;
            }
            if !(ff >= fr - 1e-8) {
                floor_breaks.push(row.problem.clone());
            }
        }
        let frac_ref = by_ref as f64 / out.summary.len() as f64;
        pass &= own >= need && frac_ref >= need && floor_breaks.is_empty() && out.all_clean();
        parts.push(format!(
            "{kind:?}: {:.0}% against own best, {by_ref}/{} ({:.0}%) against f_ref, need {:.0}%, floor breaks {:?}",
            own * 100.0,
            out.summary.len(),
            frac_ref * 100.0,
            need * 100.0,
            floor_breaks
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    outcome(pass, parts.join("; "))
}

/// Exact models on affine problems.
fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut failures = Vec::new();
    for i in 0..40 {
        let kind = if i % 2 == 0 { OuterKind::L1 } else { OuterKind::Minimax };
        let p = if (i / 2) % 2 == 0 { PNorm::One } else { PNorm::Infinity };
        let n = rng.random_range(2..=6);
        let ap = dyadic_affine(&mut rng, kind, n);
        let r = run_analytic(&ap, p, 100);
        for s in r.iterations.iter().filter(|s| s.class != IterationClass::U1) {
            checked += 1;
            match s.rho {
                Some(rho) => worst = worst.max((rho - 1.0).abs()),
                None => failures.push(format!("{} #{i} k={}: no ratio", ap.name, s.k)),
            }
        }
        if !matches!(r.termination, Termination::EtaFloor | Termination::DeltaFloor) {
            failures.push(format!("{} #{i}: {}", ap.name, r.termination));
        }
    }
    if worst > 1e-12 {
        failures.push(format!("dyadic max |ρ − 1| = {worst:e}"));
    }
    let mut registry_worst = 0.0f64;
    let mut registry = 0;
    for (bp, r) in registry_runs() {
        if !bp.analytic().is_some_and(|ap| ap.lipschitz_j == 0.0) && !["MAXL", "Goffin"].contains(&bp.name) {
            continue;
        }
        registry += 1;
        for s in r.iterations.iter().filter(|s| s.class != IterationClass::U1) {
            registry_worst = registry_worst.max(s.rho.map_or(f64::INFINITY, |v| (v - 1.0).abs()));
        }
        if !matches!(r.termination, Termination::EtaFloor | Termination::DeltaFloor) {
            failures.push(format!("{}: {}", bp.name, r.termination));
        }
    }
    if registry_worst > 1e-12 {
        failures.push(format!("registry max |ρ − 1| = {registry_worst:e}"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "40 dyadic affine runs, {checked} trial iterations, max |ρ − 1| = {worst:e}; {registry} registry affine runs, max |ρ − 1| = {registry_worst:e}{}",
            failures.first().map(|v| format!(", first failure: {v}")).unwrap_or_default()
        ),
    )
}

/// Per-class costs, recounted independently of the audit.
fn recount(r: &RunRecord) -> Result<BTreeMap<&'static str, u64>, String> {
    let n = r.n as u64;
    let mut prev = u64::from(r.total_evals > 0);
    let mut after_u2 = false;
    let mut costs: BTreeMap<&'static str, u64> = BTreeMap::new();
    for s in &r.iterations {
        let entered_step3 = s.entry == Entry::Step3;
        if entered_step3 != after_u2 {
            return Err(format!("k={}: entry {:?} after U2 = {after_u2}", s.k, s.entry));
        }
        let (label, cost) = match (s.class, entered_step3) {
            (IterationClass::U1, false) => ("U1", n),
            (_, true) => ("trial after U2", 1),
            (IterationClass::Success, false) => ("S", n + 1),
            (IterationClass::U2, false) => ("U2", n + 1),
            (IterationClass::U3, false) => ("U3", n + 1),
        };
        if s.evals - prev != cost {
            return Err(format!("k={} ({}): cost {} expected {cost}", s.k, s.class, s.evals - prev));
        }
        *costs.entry(label).or_default() += 1;
        prev = s.evals;
        after_u2 = s.class == IterationClass::U2;
    }
    if prev + r.trailing_evals != r.total_evals {
        return Err("trailing evaluations do not add up".into());
    }
    if r.total_evals > 100 * (n + 1) {
        return Err(format!("{} evaluations exceed 100(n + 1)", r.total_evals));
    }
    Ok(costs)
}

fn criterion_7() -> Outcome {
    let mut records: Vec<RunRecord> = Vec::new();
    for kind in [OuterKind::L1, OuterKind::Minimax] {
        for solver in [SolverConfig::trfd_l1(), SolverConfig::trfd_m()] {
            let mut c = family_campaign(kind, 4);
            c.solvers = vec![solver];
            records.extend(run_campaign(&c, None).unwrap().records);
        }
    }
    records.extend(random_instances(50, 77).iter().map(|(ap, p)| run_analytic(ap, *p, 100)));
    let mut totals: BTreeMap<&'static str, u64> = BTreeMap::new();
    let mut failures = Vec::new();
    for r in &records {
        match recount(r) {
            Ok(c) => c.into_iter().for_each(|(k, v)| *totals.entry(k).or_default() += v),
            Err(e) => failures.push(format!("{}/{}: {e}", r.solver, r.problem)),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} traces, iteration counts {totals:?}, {} mismatches{}",
            records.len(),
            failures.len(),
            failures.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    )
}

/// Radii stay above Δ_min(ε) while the true stationarity measure exceeds ε.
fn criterion_8() -> Outcome {
    let mut cases: Vec<(AnalyticProblem, RunRecord)> = registry_runs()
        .into_iter()
        .filter_map(|(bp, r)| bp.analytic().map(|ap| (ap, r)))
        .filter(|(ap, _)| ap.lipschitz_j.is_finite())
        .collect();
    cases.extend(random_instances(50, 88).into_iter().map(|(ap, p)| {
        let r = run_analytic(&ap, p, 100);
        (ap, r)
    }));
    let mut checked = 0;
    let mut violations = Vec::new();
    for (ap, r) in &cases {
        let rp = &r.params;
        let (n, m) = (r.n, r.m);
        let lh = l_h(ap.h.kind, rp.p, m);
        let dmin = (1.0 - rp.alpha) * rp.theta * rp.epsilon
            / (4.0 * lh * rp.sigma.max(ap.lipschitz_j) * cp2(rp.p, m) * c2p(rp.p, n).powi(2));
        let mut certified = true;
        let mut last_iterate = usize::MAX;
        let mut psi_last = f64::NAN;
        for s in &r.iterations {
            if !certified {
                break;
            }
            checked += 1;
            if !(s.delta >= dmin) {
                violations.push(format!("{} k={}: Δ = {:e} < {dmin:e}", r.problem, s.k, s.delta));
            }
            if s.iterate != last_iterate {
                let x = &r.iterates[s.iterate];
                psi_last = if ap.in_certified_box(x) {
                    psi(ap, x, rp.p, rp.delta_star).unwrap()
                } else {
                    f64::NAN
                };
                last_iterate = s.iterate;
            }
            certified = psi_last > rp.epsilon;
        }
    }
    outcome(
        violations.is_empty() && checked > 0,
        format!(
            "{} analytic runs, {checked} radii on certified prefixes, {} violations{}",
            cases.len(),
            violations.len(),
            violations.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    )
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

/// Two campaign executions, one parallel and one serial, give identical files.
fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, jobs) in [(a.path(), 4), (b.path(), 1)] {
        for kind in [OuterKind::L1, OuterKind::Minimax] {
            let sub = dir.join(format!("{kind:?}"));
            run_campaign(&family_campaign(kind, jobs), Some(&sub)).unwrap();
        }
    }
    let ta = read_tree(a.path());
    let tb = read_tree(b.path());
    let differing: Vec<&String> = ta.keys().filter(|k| ta.get(*k) != tb.get(*k)).collect();
    outcome(
        ta.len() == tb.len() && differing.is_empty() && !ta.is_empty(),
        format!(
            "{} files per execution, {} differ{}",
            ta.len(),
            differing.len(),
            differing.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("invariant suite", criterion_1, 120),
        ("oracle equivalence", criterion_2, 60),
        ("finite-difference error bound", criterion_3, 600),
        ("ψ_2 closed form", criterion_4, 600),
        ("desk-scale convergence", criterion_5, 300),
        ("affine exactness", criterion_6, 600),
        ("evaluation accounting", criterion_7, 600),
        ("Δ_min audit", criterion_8, 600),
        ("determinism", criterion_9, 600),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = run();
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(*limit) {
            o.pass = false;
            o.detail.push_str(&format!(", exceeded {limit} s"));
        }
        println!(
            "criterion {} {name}: {} ({:.1} s) {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

//! `trfd`: run benchmark campaigns, build data profiles, audit traces, list the registry.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use trfd_core::campaign::{load_traces, profile_file_name, run_campaign, Campaign, SummaryRow};
use trfd_core::config::{CampaignConfig, ProblemConfig};
use trfd_core::diagnostics::audit_trace;
use trfd_core::profile::{data_profile, emit_profile_csv};
use trfd_core::{testset, EvalBudget, OuterKind, RunRecord};

#[derive(Parser)]
#[command(name = "trfd", version, about = "Derivative-free trust-region benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign described by a config file.
    Run(RunArgs),
    /// Build data-profile CSVs from a directory of traces.
    Profile(ProfileArgs),
    /// Re-derive and check every iteration of the given traces.
    Audit(AuditArgs),
    /// List the registry problems.
    List(ListArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Campaign config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for traces, summary and profiles.
    #[arg(long, default_value = "trfd-out")]
    out: PathBuf,
    /// Budget in simplex gradients; overrides the config.
    #[arg(long)]
    budget: Option<u64>,
    /// Data-profile tolerance; repeatable, overrides the config.
    #[arg(long = "tolerance")]
    tolerances: Vec<f64>,
    /// Concurrent runs; overrides the config.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Directory of trace files.
    traces: PathBuf,
    /// Output directory for the CSVs.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Budget in simplex gradients; defaults to the budget recorded in the traces.
    #[arg(long)]
    budget: Option<u64>,
    /// Data-profile tolerance; repeatable.
    #[arg(long = "tolerance")]
    tolerances: Vec<f64>,
}

#[derive(Args)]
struct AuditArgs {
    /// Trace files or directories of traces.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Skip the analytic checks even for registry problems with a certified Jacobian.
    #[arg(long)]
    no_analytic: bool,
}

#[derive(Args)]
struct ListArgs {
    /// Only problems of this family (l1 or minimax).
    #[arg(long)]
    family: Option<OuterKind>,
    /// Write one problem document per entry into this directory.
    #[arg(long)]
    export: Option<PathBuf>,
    /// Bind exported documents to this oracle command; `{name}` is replaced by the problem name.
    #[arg(long)]
    command: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Profile(a) => profile(a),
        Command::Audit(a) => audit(a),
        Command::List(a) => list(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn check_tolerances(t: &[f64]) -> Result<()> {
    if let Some(bad) = t.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        bail!("tolerance {bad} is outside (0, 1)");
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.6e}"))
}

fn print_summary(rows: &[SummaryRow]) {
    println!(
        "{:<10} {:<22} {:>3} {:>3} {:>3} {:>13} {:>13} {:>13} {:>6}  termination",
        "solver", "problem", "n", "m", "p", "f0", "final f", "f_ref", "evals"
    );
    for r in rows {
        println!(
            "{:<10} {:<22} {:>3} {:>3} {:>3} {:>13} {:>13} {:>13} {:>6}  {}{}",
            r.solver,
            r.problem,
            r.n,
            r.m,
            r.p,
            fmt_opt(r.f0),
            fmt_opt(r.final_f),
            fmt_opt(r.f_ref),
            r.evals,
            r.termination,
            if r.message.is_empty() { String::new() } else { format!(" ({})", r.message) }
        );
    }
}

fn run(a: RunArgs) -> Result<bool> {
    let mut cfg = CampaignConfig::load(&a.config).with_context(|| format!("loading {}", a.config.display()))?;
    if let Some(b) = a.budget {
        cfg.budget = b;
    }
    if !a.tolerances.is_empty() {
        cfg.tolerances = a.tolerances;
    }
    if let Some(j) = a.jobs {
        cfg.jobs = j;
    }
    let campaign = Campaign::from_config(&cfg)?;
    let outcome = run_campaign(&campaign, Some(&a.out))?;
    print_summary(&outcome.summary);
    for dp in &outcome.profiles {
        let fractions: Vec<String> = dp
            .solvers
            .iter()
            .enumerate()
            .map(|(s, name)| format!("{name} {:.3}", dp.final_fraction(s)))
            .collect();
        println!("tolerance {:e}: {}", dp.tolerance, fractions.join(", "));
    }
    println!("wrote {}", a.out.display());
    let clean = outcome.all_clean();
    if !clean {
        eprintln!("some runs ended in OracleError or NumericalTrouble");
    }
    Ok(clean)
}

fn profile(a: ProfileArgs) -> Result<bool> {
    let tolerances = if a.tolerances.is_empty() {
        trfd_core::config::DEFAULT_TOLERANCES.to_vec()
    } else {
        a.tolerances
    };
    check_tolerances(&tolerances)?;
    let records = load_traces(&a.traces)?;
    if records.is_empty() {
        bail!("no traces in {}", a.traces.display());
    }
    let budget = match a.budget {
        Some(b) => b,
        None => {
            let b = records[0].params.simplex_gradients;
            if records.iter().any(|r| r.params.simplex_gradients != b) {
                bail!("traces were run with different budgets; pass --budget");
            }
            b
        }
    };
    if let Some(r) = records.iter().find(|r| r.total_evals > EvalBudget::new(budget).max_evaluations(r.n)) {
        bail!("{} / {} used {} evaluations, more than the budget allows", r.solver, r.problem, r.total_evals);
    }
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for tol in tolerances {
        let dp = data_profile(&records, tol, budget)?;
        let path = a.out.join(profile_file_name(tol));
        emit_profile_csv(&dp, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(true)
}

fn collect_traces(paths: &[PathBuf]) -> Result<Vec<(PathBuf, RunRecord)>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|e| e == "json"))
                .collect();
            files.sort();
            for f in files {
                out.push(read_trace(&f)?);
            }
        } else {
            out.push(read_trace(p)?);
        }
    }
    Ok(out)
}

fn read_trace(path: &Path) -> Result<(PathBuf, RunRecord)> {
    let r = RunRecord::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok((path.to_path_buf(), r))
}

fn audit(a: AuditArgs) -> Result<bool> {
    let traces = collect_traces(&a.paths)?;
    if traces.is_empty() {
        bail!("no traces found");
    }
    let mut failures = 0;
    for (path, r) in &traces {
        // Registry certificates apply only when the trace matches the entry's shape.
        let analytic = if a.no_analytic {
            None
        } else {
            testset::find(&r.problem)
                .filter(|bp| bp.n == r.n && bp.m == r.m && bp.family == r.outer)
                .and_then(|bp| bp.analytic())
        };
        match audit_trace(r, analytic.as_ref()) {
            Ok(rep) => println!("{rep}"),
            Err(e) => {
                failures += 1;
                println!("audit {} / {}: FAILED at {e} ({})", r.solver, r.problem, path.display());
            }
        }
    }
    println!("{} traces audited, {failures} failed", traces.len());
    Ok(failures == 0)
}

fn list(a: ListArgs) -> Result<bool> {
    let problems: Vec<_> = testset::registry()
        .into_iter()
        .filter(|p| a.family.is_none_or(|f| p.family == f))
        .collect();
    println!("{:<22} {:<8} {:>3} {:>3} {:>13} {:>13}  certified", "name", "family", "n", "m", "f(x0)", "f_ref");
    for p in &problems {
        println!(
            "{:<22} {:<8} {:>3} {:>3} {:>13.6e} {:>13.6e}  {}",
            p.name,
            p.family,
            p.n,
            p.m,
            p.f_x0,
            p.f_ref,
            if p.certificate.is_some() { "yes" } else { "no" }
        );
    }
    if let Some(dir) = a.export {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for p in &problems {
            let command = a.command.as_ref().map(|c| c.replace("{name}", p.name));
            let doc = ProblemConfig::from_registry(p, command.as_deref());
            let path = dir.join(format!("{}.toml", p.name));
            std::fs::write(&path, doc.to_toml_string()).with_context(|| format!("writing {}", path.display()))?;
        }
        println!("exported {} problems to {}", problems.len(), dir.display());
    }
    Ok(true)
}

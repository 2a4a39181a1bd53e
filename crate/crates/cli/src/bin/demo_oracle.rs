//! Serves a registry problem over the line protocol on stdin/stdout.

use clap::{Parser, ValueEnum};
use std::io::{self, BufReader};
use std::process::ExitCode;
use trfd_core::oracle::wire;
use trfd_core::testset;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Answer with the registry residuals.
    Normal,
    /// Answer with `x` itself.
    Echo,
    /// Answer with one residual too many.
    WrongM,
}

#[derive(Parser)]
#[command(name = "demo_oracle", about = "Line-protocol oracle for registry problems")]
struct Args {
    /// Registry problem name.
    #[arg(long)]
    problem: String,
    #[arg(long, value_enum, default_value = "normal")]
    mode: Mode,
    /// Reply with an error record from this query on (1-based).
    #[arg(long)]
    fail_after: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(bp) = testset::find(&args.problem) else {
        eprintln!("demo_oracle: unknown problem {:?}", args.problem);
        return ExitCode::from(2);
    };
    let mut calls = 0u64;
    let stdin = io::stdin();
    let result = wire::serve(BufReader::new(stdin.lock()), io::stdout().lock(), |x| {
        calls += 1;
        if args.fail_after.is_some_and(|k| calls >= k) {
            return Err(format!("refusing query {calls}"));
        }
        if x.len() != bp.n {
            return Err(format!("expected {} coordinates, got {}", bp.n, x.len()));
        }
        Ok(match args.mode {
            Mode::Normal => (bp.residual)(x),
            Mode::Echo => x.to_vec(),
            Mode::WrongM => {
                let mut f = (bp.residual)(x);
                f.push(0.0);
                f
            }
        })
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("demo_oracle: {e}");
            ExitCode::from(1)
        }
    }
}

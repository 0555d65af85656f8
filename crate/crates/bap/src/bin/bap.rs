//! CLI for best approximation pairs: solve a spec file, certify
//! uniqueness/existence, cross-check with the grid oracle, or rerun the
//! built-in corpus.
//!
//! Exit codes: 0 success, 1 usage or spec errors, 2 solver failed to
//! converge (or suspects an unattained infimum), 3 corpus mismatch.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bap::error::Error;
use bap::problem::parse_problem;
use bap::report::best_run;
use bap::runner::{run_corpus, run_pipeline, wants_plotdata, write_plotdata, Overrides, Pipeline};

#[derive(Parser)]
#[command(name = "bap", version, about = "best approximation pairs between convex sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem spec file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Write the report here instead of stdout; plot data goes to <out>.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the solver seed from the spec.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of multistart runs.
    #[arg(long)]
    starts: Option<usize>,
    /// Override the oracle grid resolution.
    #[arg(long)]
    resolution: Option<f64>,
    /// Suppress progress output on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the multistart solver and report the best pair.
    Solve(ProblemArgs),
    /// Solve, then attach uniqueness and existence certificates.
    Certify(ProblemArgs),
    /// Certify, then cross-check against the brute-force grid oracle.
    Oracle(ProblemArgs),
    /// Rerun the built-in benchmark corpus against its recorded results.
    ReproducePaper {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
}

fn fail(e: &Error) -> ExitCode {
    match e {
        Error::Schema(errors) => {
            eprintln!("spec validation failed:");
            for err in errors {
                eprintln!("  {}: {}", err.path, err.message);
            }
        }
        other => eprintln!("error: {other}"),
    }
    ExitCode::from(1)
}

fn emit(report: &serde_json::Value, out: &Option<PathBuf>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(report).expect("reports always serialize");
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Error::Unsupported(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run_problem(args: &ProblemArgs, pipeline: Pipeline) -> ExitCode {
    let contents = match std::fs::read_to_string(&args.spec) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.spec.display());
            return ExitCode::from(1);
        }
    };
    let spec = match parse_problem(&contents) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let ov = Overrides {
        seed: args.seed,
        starts: args.starts,
        resolution: args.resolution,
    };
    let out = match run_pipeline(&spec, pipeline, &ov) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Err(e) = emit(&out.report, &args.out) {
        return fail(&e);
    }
    if wants_plotdata(&spec) {
        let Some(base) = &args.out else {
            eprintln!("error: plot data output requires --out");
            return ExitCode::from(1);
        };
        let path = PathBuf::from(format!("{}.csv", base.display()));
        let best = best_run(&out.multistart);
        if let Err(e) = write_plotdata(&spec, best, &path) {
            return fail(&e);
        }
        if !args.quiet {
            eprintln!("plot data written to {}", path.display());
        }
    }
    if !out.solver_ok {
        if !args.quiet {
            eprintln!("solver did not converge; a diverging run suggests an unattained infimum");
        }
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn run_reproduce(out: &Option<PathBuf>, quiet: bool) -> ExitCode {
    let outcome = match run_corpus(quiet) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    for row in &outcome.rows {
        let status = if row.failures.is_empty() { "pass" } else { "FAIL" };
        println!("{status}  {:32} distance {:.6}", row.name, row.distance);
        for f in &row.failures {
            println!("      {f}");
        }
    }
    if let Err(e) = emit(&outcome.report, out) {
        return fail(&e);
    }
    if outcome.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Solve(args) => run_problem(args, Pipeline::Solve),
        Command::Certify(args) => run_problem(args, Pipeline::Certify),
        Command::Oracle(args) => run_problem(args, Pipeline::Oracle),
        Command::ReproducePaper { out, quiet } => run_reproduce(out, *quiet),
    }
}

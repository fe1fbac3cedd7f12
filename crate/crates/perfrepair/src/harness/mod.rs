//! CLI orchestration: suite loading, the repair/infer/trace/validate/bench
//! subcommands, patch files, and deterministic reports.

mod patchfile;
mod pipeline;
mod report;
mod suite;

pub use patchfile::{format_patch, parse_patch, PatchParseError};
pub use pipeline::{
    counter_exit_bounds, derive, run_bench, run_infer, run_repair, run_trace, run_validate,
    Derived, RepairOutcome, EXIT_FAIL, EXIT_OK, EXIT_USAGE,
};
pub use report::diff_lines;
pub use suite::{load_suite, SuiteError, TestSuite};

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "perfrepair", about = "Invariant-guided repair of loop performance bugs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Path to the suite TOML file.
    suite: PathBuf,
    /// Override the suite's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the search worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the falsification input budget.
    #[arg(long)]
    falsification_budget: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Infer and report invariants from the suite's runs.
    Infer(Common),
    /// Dump instrumented execution traces.
    Trace {
        #[command(flatten)]
        common: Common,
        /// Only this test case.
        #[arg(long)]
        case: Option<String>,
    },
    /// Search for and validate a repair.
    Repair {
        #[command(flatten)]
        common: Common,
        /// Also write the accepted patch here.
        #[arg(long)]
        patch_out: Option<PathBuf>,
    },
    /// Validate an externally supplied patch file.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Patch file to apply to the suite's program.
        patch: PathBuf,
    },
    /// Run every test and report step counts.
    Bench(Common),
}

fn load(common: &Common) -> Result<TestSuite, SuiteError> {
    let mut suite = load_suite(&common.suite)?;
    if let Some(seed) = common.seed {
        suite.seed = seed;
        suite.search.seed = seed;
    }
    if let Some(w) = common.workers {
        suite.search.workers = w;
    }
    if let Some(b) = common.falsification_budget {
        suite.falsification_budget = b;
    }
    Ok(suite)
}

fn emit(common: &Common, report: &str) -> std::io::Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, report),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

pub fn cli_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let common = match &cli.cmd {
        Cmd::Infer(c) | Cmd::Bench(c) => c,
        Cmd::Trace { common, .. } | Cmd::Repair { common, .. } | Cmd::Validate { common, .. } => {
            common
        }
    };
    let suite = match load(common) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let (report, exit) = match &cli.cmd {
        Cmd::Infer(_) => run_infer(&suite),
        Cmd::Bench(_) => run_bench(&suite),
        Cmd::Trace { case, .. } => run_trace(&suite, case.as_deref()),
        Cmd::Validate { patch, .. } => {
            let text = match std::fs::read_to_string(patch) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", patch.display());
                    return EXIT_USAGE;
                }
            };
            match parse_patch(&text) {
                Ok(p) => run_validate(&suite, &p),
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            }
        }
        Cmd::Repair { patch_out, .. } => {
            let outcome = run_repair(&suite);
            if let (Some(path), Some(patch)) = (patch_out, &outcome.patch) {
                if let Err(e) = std::fs::write(path, format_patch(patch)) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            (outcome.report, outcome.exit)
        }
    };
    if let Err(e) = emit(common, &report) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    exit
}

//! `rvt`: command-line front end for requirements validation.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rvt_core::checks::{check_all, check_consistency, check_property, check_scenario, parse_all, CheckConfig};
use rvt_core::discretize::check_trace;
use rvt_core::project::load_project;
use rvt_core::{BmcConfig, CheckResult, HybridTrace, Project, SmtConfig};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(name = "rvt", version, about = "Validate formalized requirements: consistency, scenarios, properties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and typecheck every constraint of a project.
    Parse { project: PathBuf },
    /// Run a validation check.
    Check(CheckArgs),
    /// Render a witness trace file.
    Trace { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Consistency,
    Scenario,
    Property,
    All,
}

#[derive(clap::Args)]
struct CheckArgs {
    which: Which,
    project: PathBuf,
    /// Scenario or property id.
    #[arg(long)]
    id: Option<String>,
    /// Comma-separated, strictly increasing lasso bounds.
    #[arg(long, value_delimiter = ',', default_values_t = rvt_core::solve::DEFAULT_SCHEDULE)]
    bound_schedule: Vec<usize>,
    #[arg(long, default_value_t = rvt_core::solve::DEFAULT_CEGAR_ITERATIONS)]
    cegar_iters: usize,
    /// Solver command (default: $RVT_SMT_SOLVER or z3).
    #[arg(long)]
    solver: Option<String>,
    /// Per-query solver timeout (default: $RVT_SMT_TIMEOUT_MS or none).
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// Print results as JSON.
    #[arg(long)]
    json: bool,
    /// Write every solver transcript into this directory.
    #[arg(long)]
    dump_smt: Option<PathBuf>,
    /// Checks run in parallel by `check all`.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_ERROR)
}

fn load(path: &PathBuf) -> Result<Project, ExitCode> {
    load_project(path).map_err(fail)
}

fn cmd_parse(path: &PathBuf) -> ExitCode {
    let project = match load(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    match parse_all(&project) {
        Ok(parsed) => {
            let n: usize = parsed.values().map(Vec::len).sum();
            println!("{n} constraints OK");
            ExitCode::from(EXIT_OK)
        }
        Err(diags) => {
            for d in &diags {
                let src = project.requirement(&d.requirement).and_then(|r| r.constraints.get(d.index));
                print!("{}", report::diagnostic(d, src.map(String::as_str)));
            }
            println!("{} error(s)", diags.len());
            ExitCode::from(EXIT_NEGATIVE)
        }
    }
}

fn config(args: &CheckArgs) -> Result<CheckConfig, String> {
    let mut cfg = CheckConfig::default();
    cfg.solve.bmc = BmcConfig::new(args.bound_schedule.clone())?;
    cfg.solve.cegar.max_iterations = args.cegar_iters;
    let mut smt = SmtConfig::from_env();
    if let Some(s) = &args.solver {
        smt.solver = s.clone();
    }
    if let Some(ms) = args.timeout_ms {
        if ms == 0 {
            return Err("timeout must be positive".into());
        }
        smt.timeout = Some(Duration::from_millis(ms));
    }
    smt.dump_dir = args.dump_smt.clone();
    cfg.solve.smt = smt;
    Ok(cfg)
}

fn exit_for(results: &[&CheckResult]) -> u8 {
    if results.iter().any(|r| r.verdict.is_negative()) {
        EXIT_NEGATIVE
    } else if results.iter().any(|r| !r.verdict.is_positive()) {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    }
}

fn cmd_check(args: &CheckArgs) -> ExitCode {
    let project = match load(&args.project) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let cfg = match config(args) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let results: Vec<CheckResult> = match args.which {
        Which::All => {
            let mut out = Vec::new();
            for (kind, r) in check_all(&project, &cfg, args.jobs) {
                match r {
                    Ok(r) => out.push(r),
                    Err(e) => return fail(format!("{kind}: {e}")),
                }
            }
            out
        }
        which => {
            let id = args.id.as_deref();
            let r = match (which, id) {
                (Which::Consistency, _) => check_consistency(&project, &cfg),
                (Which::Scenario, Some(id)) => check_scenario(&project, id, &cfg),
                (Which::Property, Some(id)) => check_property(&project, id, &cfg),
                _ => return fail("--id is required for scenario and property checks"),
            };
            match r {
                Ok(r) => vec![r],
                Err(e) => return fail(e),
            }
        }
    };
    if args.json {
        let text = if matches!(args.which, Which::All) {
            serde_json::to_string_pretty(&results)
        } else {
            serde_json::to_string_pretty(&results[0])
        };
        println!("{}", text.expect("results serialize"));
    } else {
        for (i, r) in results.iter().enumerate() {
            if i > 0 {
                println!();
            }
            print!("{}", report::check(r, &project));
        }
    }
    ExitCode::from(exit_for(&results.iter().collect::<Vec<_>>()))
}

fn cmd_trace(path: &PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(format!("cannot read {}: {e}", path.display())),
    };
    let trace: HybridTrace = match serde_json::from_str(&text) {
        Ok(t) => t,
        Err(e) => return fail(format!("malformed trace file: {e}")),
    };
    if let Err(e) = check_trace(&trace) {
        return fail(e);
    }
    print!("{}", report::trace(&trace));
    ExitCode::from(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Parse { project } => cmd_parse(project),
        Command::Check(args) => cmd_check(args),
        Command::Trace { file } => cmd_trace(file),
    }
}

//! `molars`: run, validate and cross-check model transformations.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use log::info;
use rayon::prelude::*;

use molars::corpus::check::{
    check_bundled_task, circle_solutions_agree, oracle_expectations, render_expected, CheckConfig,
};
use molars::corpus::summary::summarize;
use molars::corpus::{Task, TaskId};
use molars::dsl::render_diagnostics;
use molars::interpreter::{ExecStatus, Interpreter, DEFAULT_ITERATION_CAP};
use molars::metamodel::Metamodel;
use molars::model::import_model;
use molars::oracle::oracle_run;
use molars::pipeline::{PipelineError, Transformation};

const OK: u8 = 0;
const INVALID: u8 = 1;
const RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(
    name = "molars",
    version,
    about = "Rule-based model transformation engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a transformation program on a model.
    Run(RunArgs),
    /// Check a model against a metamodel.
    Validate(ValidateArgs),
    /// Run a bundled task on a model with both the engine and its oracle.
    Oracle(OracleArgs),
    /// Check every bundled task against the oracles on fixtures and random models.
    CorpusCheck(CorpusArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Transformation program.
    #[arg(long)]
    program: PathBuf,
    /// Procedure to start from.
    #[arg(long, default_value = "main")]
    entry: String,
    /// Input metamodel; repeat to merge several.
    #[arg(long = "metamodel", required = true)]
    metamodels: Vec<PathBuf>,
    /// Metamodel the result is exported to; repeatable. Defaults to the input metamodels.
    #[arg(long = "target")]
    targets: Vec<PathBuf>,
    /// Temporary metamodel extension; repeatable.
    #[arg(long = "extension")]
    extensions: Vec<PathBuf>,
    /// Input model.
    #[arg(long)]
    model: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep temporary elements in the exported model.
    #[arg(long)]
    no_strip: bool,
    /// Log every procedure call, rule and loop.
    #[arg(long)]
    trace: bool,
    /// Maximum applications of a single while rule.
    #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
    max_iterations: usize,
}

#[derive(Args)]
struct ValidateArgs {
    /// Metamodel; repeat to merge several.
    #[arg(long = "metamodel", required = true)]
    metamodels: Vec<PathBuf>,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Task id such as `p2_4`.
    #[arg(long)]
    task: String,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct CorpusArgs {
    /// Seed for the random models.
    #[arg(long, env = "MOLARS_SEED", default_value_t = CheckConfig::default().seed)]
    seed: u64,
    /// Number of random models.
    #[arg(long = "random", default_value_t = CheckConfig::default().random_models)]
    random_models: usize,
    /// Worker threads; one task per job.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the oracle predictions for every fixture into this directory and exit.
    #[arg(long, value_name = "DIR")]
    write_expected: Option<PathBuf>,
}

/// A failure that ends the command with `code` after printing `message`.
struct Exit {
    code: u8,
    message: String,
}

impl Exit {
    fn new(code: u8, message: impl Into<String>) -> Exit {
        Exit {
            code,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Exit>;

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit::new(RUNTIME, format!("{}: {e}", path.display())))
}

fn load_metamodels(paths: &[PathBuf]) -> Result<Vec<Metamodel>, Exit> {
    paths
        .iter()
        .map(|p| {
            Metamodel::from_json(&read(p)?)
                .map_err(|e| Exit::new(INVALID, format!("{}: {e}", p.display())))
        })
        .collect()
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Exit> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Exit::new(RUNTIME, format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Exit::new(RUNTIME, format!("stdout: {e}"))),
    }
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let metamodels = load_metamodels(&args.metamodels)?;
    let targets = if args.targets.is_empty() {
        metamodels.clone()
    } else {
        load_metamodels(&args.targets)?
    };
    let extension_texts = args
        .extensions
        .iter()
        .map(|p| read(p))
        .collect::<Result<Vec<_>, _>>()?;
    let extensions: Vec<&str> = extension_texts.iter().map(String::as_str).collect();
    let program_text = read(&args.program)?;
    let transformation = Transformation::new(&metamodels, &extensions, &targets, &program_text)
        .map_err(|e| match e {
            PipelineError::Program(d) => Exit::new(
                INVALID,
                render_diagnostics(&args.program.display().to_string(), &d).trim_end(),
            ),
            other => Exit::new(INVALID, other.to_string()),
        })?;
    let document = read(&args.model)?;
    let mut model = transformation
        .import(&document)
        .map_err(|e| Exit::new(INVALID, format!("{}: {e}", args.model.display())))?;
    let interpreter = Interpreter::new().with_iteration_cap(args.max_iterations);
    info!("running {} on {}", args.entry, args.model.display());
    match transformation.run(&interpreter, &args.entry, &mut model) {
        ExecStatus::Completed => {
            write_output(
                args.out.as_deref(),
                &transformation.export(&model, !args.no_strip),
            )?;
            Ok(OK)
        }
        ExecStatus::Failed(f) => Err(Exit::new(RUNTIME, format!("runtime failure: {f}"))),
    }
}

fn cmd_validate(args: ValidateArgs) -> CmdResult {
    let metamodel = Metamodel::merge(&load_metamodels(&args.metamodels)?)
        .map_err(|e| Exit::new(INVALID, e.to_string()))?;
    let document = read(&args.model)?;
    let model = import_model(&document, Arc::new(metamodel))
        .map_err(|e| Exit::new(INVALID, format!("{}: {e}", args.model.display())))?;
    let violations = model.check_conformance();
    if violations.is_empty() {
        println!("{}: ok", args.model.display());
        Ok(OK)
    } else {
        for v in &violations {
            eprintln!("{}: {v}", args.model.display());
        }
        Ok(INVALID)
    }
}

fn cmd_oracle(args: OracleArgs) -> CmdResult {
    let id: TaskId = args
        .task
        .parse()
        .map_err(|e: molars::corpus::UnknownTask| Exit::new(RUNTIME, e.to_string()))?;
    let task = Task::get(id);
    let document = read(&args.model)?;
    let (status, out) = task
        .run(&Interpreter::new(), &document)
        .map_err(|e| Exit::new(INVALID, format!("{}: {e}", args.model.display())))?;
    let output = match (status, out) {
        (ExecStatus::Completed, Some(o)) => o,
        (ExecStatus::Failed(f), _) => {
            return Err(Exit::new(RUNTIME, format!("runtime failure: {f}")))
        }
        (ExecStatus::Completed, None) => unreachable!("completed runs export"),
    };
    let engine = summarize(task.summary, &output).map_err(|e| Exit::new(RUNTIME, e))?;
    let oracle =
        oracle_run(id, &document).map_err(|e| Exit::new(RUNTIME, format!("oracle: {e}")))?;
    println!("engine: {engine}");
    println!("oracle: {oracle}");
    if engine == oracle {
        Ok(OK)
    } else {
        eprintln!("mismatch:\n- engine {engine}\n+ oracle {oracle}");
        Ok(INVALID)
    }
}

fn cmd_corpus_check(args: CorpusArgs) -> CmdResult {
    if let Some(dir) = args.write_expected {
        fs::create_dir_all(&dir)
            .map_err(|e| Exit::new(RUNTIME, format!("{}: {e}", dir.display())))?;
        for id in TaskId::ALL {
            let expected =
                oracle_expectations(id).map_err(|e| Exit::new(RUNTIME, format!("{id}: {e}")))?;
            let path = dir.join(format!("{id}.json"));
            fs::write(&path, render_expected(&expected))
                .map_err(|e| Exit::new(RUNTIME, format!("{}: {e}", path.display())))?;
        }
        println!("wrote {} files to {}", TaskId::ALL.len(), dir.display());
        return Ok(OK);
    }
    let cfg = CheckConfig {
        seed: args.seed,
        random_models: args.random_models,
        ..CheckConfig::default()
    };
    let models = cfg.models();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| Exit::new(RUNTIME, e.to_string()))?;
    let (reports, circles) = pool.install(|| {
        let reports: Vec<_> = TaskId::ALL
            .par_iter()
            .map(|&id| check_bundled_task(id, &cfg, &models))
            .collect();
        (reports, circle_solutions_agree(&cfg, &models))
    });
    println!("seed {} with {} random models", cfg.seed, models.len());
    let mut failed = false;
    for r in &reports {
        let verdict = if r.passed() { "ok" } else { "FAILED" };
        println!(
            "{:<8} fixtures {:>2}  random {:>4}  digest {:016x}  {verdict}",
            r.task.as_str(),
            r.fixture_runs,
            r.random_runs,
            r.digest
        );
        for f in &r.failures {
            eprintln!("  {f}");
        }
        failed |= !r.passed();
    }
    let verdict = if circles.is_empty() { "ok" } else { "FAILED" };
    println!("p2_4 = p2_4_a  {verdict}");
    for f in &circles {
        eprintln!("  {f}");
    }
    failed |= !circles.is_empty();
    Ok(if failed { INVALID } else { OK })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let trace = matches!(&cli.command, Command::Run(a) if a.trace);
    let default_filter = if trace { "molars=trace" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_filter))
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::CorpusCheck(a) => cmd_corpus_check(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(exit) => {
            eprintln!("error: {}", exit.message);
            ExitCode::from(exit.code)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mnemo_core::executor::Budgets;
use mnemo_core::harness::{compare_modes, parse_mode, replay_file, run_suite, BackendKind, RunConfig, SUITES};
use mnemo_core::memory::RetrievalMode;
use mnemo_core::Domain;

#[derive(Parser)]
#[command(name = "mnemo", version, about = "Run and replay household-agent benchmark suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite and write logs and reports.
    Run(RunArgs),
    /// Run both retrieval modes and the cross-domain memory comparison.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Domain whose examples form the wrong-domain memory.
        #[arg(long, default_value = "teach")]
        wrong_domain: Domain,
    },
    /// Re-step episode logs and check their final state hashes.
    Replay {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
    },
    /// List the builtin suites.
    Suites,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Retrieval mode: `p` (prompt retrieval) or `s` (shared memory).
    #[arg(long, default_value = "p", value_parser = parse_mode)]
    mode: RetrievalMode,
    /// Planner backend: scripted, retrieval-echo or remote.
    #[arg(long, default_value = "scripted")]
    backend: BackendKind,
    /// Allow the agent to ask questions.
    #[arg(long)]
    qa: bool,
    /// Number of retrieved examples.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Builtin suite name or suite JSON file.
    #[arg(long, default_value = "listings")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for logs and reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Example memory in JSON lines.
    #[arg(long)]
    memory: Option<PathBuf>,
    /// Directory with a template manifest and template files.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Directory with `<name>.scene` files.
    #[arg(long)]
    scenes: Option<PathBuf>,
    /// Restrict example memory to these domains.
    #[arg(long, value_delimiter = ',')]
    memory_domains: Vec<Domain>,
    /// Skip precondition checks in macro actions.
    #[arg(long)]
    no_preconditions: bool,
    #[arg(long, default_value_t = Budgets::default().max_steps)]
    max_steps: u32,
    #[arg(long, default_value_t = Budgets::default().max_api_failures)]
    max_api_failures: u32,
    /// Also print the JSON report.
    #[arg(long)]
    json: bool,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        let mut cfg = RunConfig::new(&self.suite, self.backend);
        cfg.mode = self.mode;
        cfg.qa_enabled = self.qa;
        cfg.k = self.k;
        cfg.seed = self.seed;
        cfg.out = self.out.clone();
        cfg.memory = self.memory.clone();
        cfg.templates = self.templates.clone();
        cfg.scenes = self.scenes.clone();
        cfg.preconditions = !self.no_preconditions;
        cfg.budgets = Budgets { max_steps: self.max_steps, max_api_failures: self.max_api_failures, ..Budgets::default() };
        if !self.memory_domains.is_empty() {
            cfg.memory_domains = Some(self.memory_domains.clone());
        }
        cfg
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let report = run_suite(&args.config()).context("suite run failed")?;
            print!("{}", report.to_table());
            if args.json {
                println!("{}", report.to_json());
            }
        }
        Command::Compare { run, wrong_domain } => {
            let cmp = compare_modes(&run.config(), wrong_domain).context("comparison failed")?;
            print!("{}", cmp.to_table());
            if run.json {
                println!("{}", serde_json::to_string_pretty(&cmp)?);
            }
        }
        Command::Replay { logs } => {
            let mut failed = 0;
            for path in &logs {
                let verdict = replay_file(path).with_context(|| path.display().to_string())?;
                let ok = verdict.verified();
                failed += usize::from(!ok);
                println!("{} {} ({} actions)", if ok { "ok  " } else { "FAIL" }, verdict.episode_id, verdict.actions);
            }
            if failed > 0 {
                bail!("{failed} of {} logs did not replay to their recorded state", logs.len());
            }
        }
        Command::Suites => {
            for s in SUITES {
                println!("{s}");
            }
        }
    }
    Ok(())
}

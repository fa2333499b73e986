use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use ampforge_core::amplify::{AmplifierKind, UnknownAmplifier};
use ampforge_core::interp::{ExecOptions, DEFAULT_BUDGET};
use ampforge_core::mutation::{BaselineRedError, MutantInfo, MutationAnalyzer};
use ampforge_core::orchestrator::{amplify_suite, AmplificationConfig};
use ampforge_core::project::{Project, ProjectError};
use ampforge_core::report::{build_report, summary, to_json, write_patches};
use ampforge_core::syntax::MethodDecl;
use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ampforge", version, about = "Mutation analysis and test amplification for MiniLang projects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Maximum interpreter steps per test run.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    step_budget: u64,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run mutation analysis on the project's tests.
    Mutate {
        /// Directory holding `src/` and `tests/`.
        project: PathBuf,
        /// Glob selecting test files.
        #[arg(long)]
        tests: Option<String>,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Seed for `random`; the clock is used when absent.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Amplify the project's tests.
    Amplify {
        /// Directory holding `src/` and `tests/`.
        project: PathBuf,
        /// Only amplify tests from this file.
        #[arg(long)]
        test: Option<String>,
        /// Input amplification rounds per test.
        #[arg(long, default_value_t = 3)]
        iterations: usize,
        /// Master seed; equal seeds give identical output.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Runs under fresh seeds used to reject flaky candidates.
        #[arg(long, default_value_t = 3)]
        reruns: usize,
        /// Comma-separated amplifier names, or `none` for assertion
        /// amplification only; all when absent.
        #[arg(long, value_parser = parse_amplifiers)]
        amplifiers: Option<BTreeSet<AmplifierKind>>,
        /// Candidates kept per test and iteration.
        #[arg(long, default_value_t = 200)]
        cap: usize,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving one patch per focused test.
        #[arg(long)]
        patches: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Serialize)]
struct MutateOutput<'a> {
    mutants: Vec<MutantInfo>,
    killed: Vec<&'a str>,
    score: f64,
}

enum Failure {
    BaselineRed(BaselineRedError),
    Static(ProjectError),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for a red baseline, so usage errors use 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::BaselineRed(e)) => {
            eprintln!("error: {e}");
            for (name, why) in &e.failing {
                eprintln!("  {name}: {why}");
            }
            ExitCode::from(2)
        }
        Err(Failure::Static(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn parse_amplifiers(s: &str) -> Result<BTreeSet<AmplifierKind>, UnknownAmplifier> {
    if s.trim().is_empty() || s.trim().eq_ignore_ascii_case("none") {
        return Ok(BTreeSet::new());
    }
    s.split(',').map(|k| k.trim().parse()).collect()
}

fn init_threads(threads: usize) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("starting worker threads")
}

fn load(project: &Path, tests: Option<&str>) -> Result<Project, Failure> {
    Project::load(project, tests).map_err(|e| match e {
        ProjectError::Io { .. } | ProjectError::Pattern(_) | ProjectError::NoTests(_) => Failure::Other(e.into()),
        e => Failure::Static(e),
    })
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Mutate { project, tests, json, seed, common } => {
            init_threads(common.threads)?;
            let project = load(&project, tests.as_deref())?;
            let seed = seed.unwrap_or_else(|| {
                SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos() as u64)
            });
            let analyzer = MutationAnalyzer::new(project.program.clone(), ExecOptions { budget: common.step_budget, seed });
            let decls: Vec<MethodDecl> = project.tests().map(|t| t.decl.clone()).collect();
            let report = analyzer.analyze(&decls).map_err(Failure::BaselineRed)?;
            let out = MutateOutput {
                mutants: analyzer.infos(),
                killed: report.killed(),
                score: ampforge_core::report::round4(report.mutation_score()),
            };
            let mut text = serde_json::to_string_pretty(&out).context("serializing report")?;
            text.push('\n');
            write_or_print(json.as_deref(), &text)?;
            if json.is_some() {
                println!(
                    "{} mutants, {} executed, {} killed, score {:.1}%",
                    report.results.len(),
                    report.executed_count(),
                    report.killed_count(),
                    report.mutation_score()
                );
            }
            Ok(())
        }
        Command::Amplify { project, test, iterations, seed, reruns, amplifiers, cap, out, patches, common } => {
            init_threads(common.threads)?;
            let project = load(&project, test.as_deref())?;
            let cfg = AmplificationConfig {
                iterations,
                reruns,
                seed,
                amplifiers: amplifiers.unwrap_or_else(|| AmplifierKind::ALL.into_iter().collect()),
                cap,
                budget: common.step_budget,
            };
            let analyzer = MutationAnalyzer::new(project.program.clone(), cfg.exec_options());
            let suite: Vec<_> = project.tests().cloned().collect();
            let outcome = amplify_suite(&analyzer, &suite, &cfg).map_err(Failure::BaselineRed)?;
            let mut decls: Vec<MethodDecl> = suite.iter().map(|t| t.decl.clone()).collect();
            decls.extend(outcome.accepted.iter().map(|a| a.test.decl.clone()));
            let after = analyzer.analyze(&decls).map_err(Failure::BaselineRed)?;
            let (report, patch_list) = build_report(&project, &analyzer, &outcome, &after, &cfg);
            if let Some(dir) = &patches {
                write_patches(&patch_list, dir).context("writing patches")?;
            }
            if let Some(path) = &out {
                write_or_print(Some(path), &to_json(&report))?;
            }
            print!("{}", summary(&report));
            Ok(())
        }
    }
}

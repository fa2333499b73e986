//! JSON report, per-test patches and the console summary.

mod diff;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::amplify::AmplifierKind;
use crate::mutation::{increase_killed_counts, MutationAnalyzer, MutationReport};
use crate::orchestrator::{focus_inputs, rank_order, select_focused, AmplificationConfig, SuiteOutcome};
use crate::project::Project;
use crate::syntax::Modification;

pub use diff::{render_diff, FileDiff, Placement};

/// Rounds to four decimals, the precision of every ratio in the report.
pub fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub iterations: usize,
    pub reruns: usize,
    pub amplifiers: Vec<AmplifierKind>,
    pub cap: usize,
    pub step_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mutants: usize,
    pub executed: usize,
    pub killed: usize,
    pub mutation_score: f64,
}

impl Metrics {
    pub fn of(report: &MutationReport) -> Self {
        Metrics {
            mutants: report.results.len(),
            executed: report.executed_count(),
            killed: report.killed_count(),
            mutation_score: round4(report.mutation_score()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestEntry {
    pub name: String,
    pub parent: String,
    pub file: String,
    pub generation: usize,
    pub ledger: Vec<Modification>,
    pub new_killed: Vec<String>,
    pub focus_method: Option<String>,
    pub focus_ratio: Option<f64>,
    pub summary: Option<String>,
    /// Patch file name, relative to the patch directory.
    pub diff: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub candidates: usize,
    pub discarded: usize,
    pub flaky: usize,
    pub new_tests: usize,
    pub focused_tests: usize,
    pub killed_before: usize,
    pub killed_after: usize,
    /// Absent when the original suite kills nothing.
    pub increase_killed: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplificationReport {
    pub config: ConfigEcho,
    pub baseline: Metrics,
    pub amplified: Metrics,
    /// Accepted tests, best ranked first.
    pub tests: Vec<TestEntry>,
    pub totals: Totals,
}

/// A unified diff against one test file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    pub file_name: String,
    pub target_file: String,
    pub test: String,
    pub focus_method: String,
    pub new_kills: usize,
    pub summary: String,
    pub placement: Placement,
    pub diff: String,
}

/// Assembles the report and the patches of the focused tests. `after` is
/// the mutation analysis of the suite plus the accepted tests.
pub fn build_report(
    project: &Project,
    analyzer: &MutationAnalyzer,
    outcome: &SuiteOutcome,
    after: &MutationReport,
    cfg: &AmplificationConfig,
) -> (AmplificationReport, Vec<Patch>) {
    let inputs = focus_inputs(analyzer, &outcome.accepted);
    let focused = select_focused(&inputs);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    order.sort_by(|&a, &b| rank_order(&inputs[a], &inputs[b]));

    let mut tests = Vec::new();
    let mut patches = Vec::new();
    for i in order {
        let accepted = &outcome.accepted[i];
        let parent = accepted.test.root_name().to_string();
        let file = project.file_of(&parent);
        let mut entry = TestEntry {
            name: accepted.test.name().to_string(),
            parent: parent.clone(),
            file: file.map(|f| f.path.clone()).unwrap_or_default(),
            generation: accepted.generation,
            ledger: accepted.test.ledger().to_vec(),
            new_killed: accepted.new_killed.iter().map(|&k| analyzer.mutants()[k].id.clone()).collect(),
            focus_method: None,
            focus_ratio: None,
            summary: None,
            diff: None,
        };
        if let Some(f) = focused.iter().find(|f| f.index == i) {
            let summary = format!("Improve test on {}", f.focus_method);
            entry.focus_method = Some(f.focus_method.clone());
            entry.focus_ratio = Some(round4(f.focus_ratio));
            entry.summary = Some(summary.clone());
            let original = file.and_then(|file| file.tests.iter().find(|t| t.name() == parent).map(|t| (file, t)));
            if let Some((file, original)) = original {
                if let Some(d) = render_diff(&file.path, &file.source, &original.decl, &accepted.test.decl) {
                    let method = f.focus_method.rsplit('.').next().unwrap_or(&f.focus_method);
                    let file_name = format!("{}_{method}.patch", entry.name);
                    entry.diff = Some(file_name.clone());
                    patches.push(Patch {
                        file_name,
                        target_file: file.path.clone(),
                        test: entry.name.clone(),
                        focus_method: f.focus_method.clone(),
                        new_kills: accepted.new_killed.len(),
                        summary,
                        placement: d.placement,
                        diff: d.diff,
                    });
                }
            }
        }
        tests.push(entry);
    }

    let killed_before = outcome.baseline.killed_count();
    let killed_after = after.killed_count();
    let report = AmplificationReport {
        config: ConfigEcho {
            seed: cfg.seed,
            iterations: cfg.iterations,
            reruns: cfg.reruns,
            amplifiers: cfg.amplifiers.iter().copied().collect(),
            cap: cfg.cap,
            step_budget: cfg.budget,
        },
        baseline: Metrics::of(&outcome.baseline),
        amplified: Metrics::of(after),
        totals: Totals {
            candidates: outcome.stats.candidates,
            discarded: outcome.stats.discarded,
            flaky: outcome.stats.flaky,
            new_tests: tests.len(),
            focused_tests: focused.len(),
            killed_before,
            killed_after,
            increase_killed: increase_killed_counts(killed_before, killed_after).ok().map(round4),
        },
        tests,
    };
    (report, patches)
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot access {}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed report {}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
}

pub fn to_json(report: &AmplificationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_report(report: &AmplificationReport, path: &Path) -> Result<(), ReportError> {
    fs::write(path, to_json(report)).map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

pub fn read_report(path: &Path) -> Result<AmplificationReport, ReportError> {
    let text = fs::read_to_string(path).map_err(|source| ReportError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| ReportError::Json { path: path.to_path_buf(), source })
}

/// Writes each patch into `dir`, creating it if needed.
pub fn write_patches(patches: &[Patch], dir: &Path) -> Result<(), ReportError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReportError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    for p in patches {
        let path = dir.join(&p.file_name);
        fs::write(&path, &p.diff).map_err(io(&path))?;
    }
    Ok(())
}

/// Console summary.
pub fn summary(report: &AmplificationReport) -> String {
    let t = &report.totals;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "mutants: {} executed, {} killed before, {} killed after",
        report.baseline.executed, t.killed_before, t.killed_after
    );
    if let Some(inc) = t.increase_killed {
        let _ = writeln!(s, "increase killed: {:.1}%", inc * 100.0);
    }
    let _ = writeln!(s, "new tests: {}, focused: {}, flaky discarded: {}", t.new_tests, t.focused_tests, t.flaky);
    for test in &report.tests {
        if let Some(line) = &test.summary {
            let _ = writeln!(s, "  {line}: {} ({} new kills)", test.name, test.new_killed.len());
        }
    }
    s
}

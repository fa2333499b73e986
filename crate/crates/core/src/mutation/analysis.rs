use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{enumerate_mutants, mutation_score, Mutant, MutantInfo};
use crate::interp::{run_test, ExecOptions, TestOutcome, TestStatus};
use crate::program::Program;
use crate::syntax::{MethodDecl, NodeId};

/// Some input tests fail on the unmutated program.
#[derive(Debug, thiserror::Error)]
#[error("{} test(s) fail on the original program: {}", failing.len(), names(failing))]
pub struct BaselineRedError {
    /// `(test name, failure)` pairs.
    pub failing: Vec<(String, String)>,
}

fn names(failing: &[(String, String)]) -> String {
    failing.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantResult {
    pub id: String,
    pub executed: bool,
    /// Covering tests that fail on the mutant, in suite order.
    pub killing_tests: Vec<String>,
    /// How the first killing test failed.
    pub outcome: Option<String>,
}

impl MutantResult {
    pub fn killed(&self) -> bool {
        !self.killing_tests.is_empty()
    }
}

/// Per-mutant results, parallel to the analyzer's mutant list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationReport {
    pub results: Vec<MutantResult>,
}

impl MutationReport {
    pub fn executed_count(&self) -> usize {
        self.results.iter().filter(|r| r.executed).count()
    }

    pub fn killed_count(&self) -> usize {
        self.results.iter().filter(|r| r.killed()).count()
    }

    /// Killed ids in mutant order.
    pub fn killed(&self) -> Vec<&str> {
        self.results.iter().filter(|r| r.killed()).map(|r| r.id.as_str()).collect()
    }

    pub fn executed(&self) -> Vec<&str> {
        self.results.iter().filter(|r| r.executed).map(|r| r.id.as_str()).collect()
    }

    /// Indices of killed mutants.
    pub fn killed_indices(&self) -> BTreeSet<usize> {
        self.results.iter().enumerate().filter(|(_, r)| r.killed()).map(|(i, _)| i).collect()
    }

    pub fn mutation_score(&self) -> f64 {
        mutation_score(self.killed_count(), self.executed_count())
    }
}

/// Holds a program, its mutants and their materialized programs so that
/// many test suites can be analyzed against the same mutant list.
pub struct MutationAnalyzer {
    program: Program,
    mutants: Vec<Mutant>,
    mutated: Vec<Program>,
    opts: ExecOptions,
}

impl MutationAnalyzer {
    pub fn new(program: Program, opts: ExecOptions) -> Self {
        let mutants = enumerate_mutants(&program);
        let mutated = mutants.par_iter().map(|m| m.program(&program)).collect();
        Self { program, mutants, mutated, opts }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn mutants(&self) -> &[Mutant] {
        &self.mutants
    }

    pub fn options(&self) -> ExecOptions {
        self.opts
    }

    pub fn infos(&self) -> Vec<MutantInfo> {
        self.mutants.iter().map(MutantInfo::from).collect()
    }

    /// Runs every test on the original program; fails if any is red.
    pub fn baseline(&self, tests: &[MethodDecl]) -> Result<Vec<TestOutcome>, BaselineRedError> {
        let outcomes: Vec<TestOutcome> = tests.par_iter().map(|t| run_test(&self.program, t, self.opts)).collect();
        let failing: Vec<(String, String)> = tests
            .iter()
            .zip(&outcomes)
            .filter(|(_, o)| !o.status.is_pass())
            .map(|(t, o)| (t.name.clone(), describe(&o.status)))
            .collect();
        if failing.is_empty() {
            Ok(outcomes)
        } else {
            Err(BaselineRedError { failing })
        }
    }

    /// Mutation analysis of a suite. Only the tests covering a mutant's
    /// statement run against it.
    pub fn analyze(&self, tests: &[MethodDecl]) -> Result<MutationReport, BaselineRedError> {
        let baseline = self.baseline(tests)?;
        let results = self
            .mutants
            .par_iter()
            .zip(&self.mutated)
            .map(|(mutant, program)| {
                let covering: Vec<&MethodDecl> = tests
                    .iter()
                    .zip(&baseline)
                    .filter(|(_, o)| o.coverage.contains(&mutant.statement))
                    .map(|(t, _)| t)
                    .collect();
                let mut result = MutantResult {
                    id: mutant.id.clone(),
                    executed: !covering.is_empty(),
                    killing_tests: Vec::new(),
                    outcome: None,
                };
                for test in covering {
                    let status = run_test(program, test, self.opts).status;
                    if !status.is_pass() {
                        result.outcome.get_or_insert_with(|| status.kind().to_string());
                        result.killing_tests.push(test.name.clone());
                    }
                }
                result
            })
            .collect();
        Ok(MutationReport { results })
    }

    /// Which of `candidates` (mutant indices) `test` kills. `coverage` is
    /// the test's coverage on the original program.
    pub fn killed_by(&self, test: &MethodDecl, coverage: &BTreeSet<NodeId>, candidates: &[usize]) -> Vec<usize> {
        candidates
            .iter()
            .copied()
            .filter(|&i| coverage.contains(&self.mutants[i].statement))
            .filter(|&i| !run_test(&self.mutated[i], test, self.opts).status.is_pass())
            .collect()
    }

    /// Runs `test` against one mutant.
    pub fn run_on_mutant(&self, index: usize, test: &MethodDecl) -> TestOutcome {
        run_test(&self.mutated[index], test, self.opts)
    }
}

fn describe(status: &TestStatus) -> String {
    match status {
        TestStatus::Pass => "pass".into(),
        TestStatus::AssertionFailure { pos, expected, actual } => format!("{pos}: expected {expected}, got {actual}"),
        TestStatus::RuntimeError { pos, message } => format!("{pos}: {message}"),
        TestStatus::StepBudgetExceeded => "step budget exceeded".into(),
    }
}

//! Tree-walking evaluator and test runner.
//!
//! Every statement and every expression costs one step. A run that exceeds
//! its budget stops with [`TestStatus::StepBudgetExceeded`], which is how
//! non-terminating mutants get killed.

mod eval;
mod value;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::program::Program;
use crate::syntax::{MethodDecl, NodeId, SourcePos};
use eval::{Fault, Frame, Machine, Unwind};

pub use eval::MAX_CALL_DEPTH;
pub use value::{Object, ObservedValue, Value};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Knobs for a single run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecOptions {
    pub budget: u64,
    /// Seed of the generator behind `random(n)`.
    pub seed: u64,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestStatus {
    Pass,
    AssertionFailure { pos: SourcePos, expected: String, actual: String },
    RuntimeError { pos: SourcePos, message: String },
    StepBudgetExceeded,
}

impl TestStatus {
    pub fn is_pass(&self) -> bool {
        matches!(self, TestStatus::Pass)
    }

    /// Short label used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            TestStatus::Pass => "pass",
            TestStatus::AssertionFailure { .. } => "assertion_failure",
            TestStatus::RuntimeError { .. } => "runtime_error",
            TestStatus::StepBudgetExceeded => "step_budget_exceeded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub point_id: u32,
    pub subject: String,
    pub getter: String,
    pub value: ObservedValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestOutcome {
    pub status: TestStatus,
    /// Application statements executed at least once.
    pub coverage: BTreeSet<NodeId>,
    pub observations: Vec<Observation>,
    /// Index of the top-level test statement that raised the exception, if
    /// the run ended with one.
    pub thrown_at: Option<usize>,
}

/// Runs `test` against `program`. `observe()` markers are ignored.
pub fn run_test(program: &Program, test: &MethodDecl, opts: ExecOptions) -> TestOutcome {
    run(program, test, opts, false)
}

/// Like [`run_test`] but records getter values at every `observe()` marker.
pub fn run_instrumented(program: &Program, test: &MethodDecl, opts: ExecOptions) -> TestOutcome {
    run(program, test, opts, true)
}

/// Union of the statement coverage of `tests`.
pub fn covered_statements<'a>(
    program: &Program,
    tests: impl IntoIterator<Item = &'a MethodDecl>,
    opts: ExecOptions,
) -> BTreeSet<NodeId> {
    let mut all = BTreeSet::new();
    for test in tests {
        all.extend(run_test(program, test, opts).coverage);
    }
    all
}

fn run(program: &Program, test: &MethodDecl, opts: ExecOptions, instrument: bool) -> TestOutcome {
    let mut machine = Machine::new(program, opts.budget, opts.seed, instrument);
    let mut frame = Frame::test();
    let mut status = TestStatus::Pass;
    let mut thrown_at = None;
    for (i, stmt) in test.body.iter().enumerate() {
        match machine.exec(&mut frame, stmt) {
            Ok(()) => {}
            Err(Unwind::Return(_)) => break,
            Err(Unwind::Fault(fault)) => {
                status = match fault {
                    Fault::Thrown { pos, message } => {
                        thrown_at = Some(i);
                        TestStatus::RuntimeError { pos, message }
                    }
                    Fault::Assert { pos, expected, actual } => TestStatus::AssertionFailure { pos, expected, actual },
                    Fault::Budget => TestStatus::StepBudgetExceeded,
                };
                break;
            }
        }
    }
    TestOutcome { status, coverage: machine.coverage, observations: machine.observations, thrown_at }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_module, Module};

    const TREELIST: &str = include_str!("../../../../samples/treelist/src/treelist.mini");

    fn program() -> Program {
        Program::new(parse_module(TREELIST, "src/treelist.mini").unwrap()).unwrap()
    }

    fn test_fn(src: &str) -> MethodDecl {
        let m: Module = parse_module(src, "tests/t.mini").unwrap();
        m.functions.into_iter().next().unwrap()
    }

    const LISTING: &str = "fn test_iteration_order() {
        let tl = new TreeList();
        tl.add(1);
        tl.add(2);
        let it = tl.list_iterator();
        assert_eq(1, it.next());
        assert_eq(2, it.next());
    }";

    #[test]
    fn iteration_order_passes() {
        let out = run_test(&program(), &test_fn(LISTING), ExecOptions::default());
        assert_eq!(out.status, TestStatus::Pass);
        assert!(!out.coverage.is_empty());
    }

    #[test]
    fn perturbed_expectation_fails() {
        let src = LISTING.replace("assert_eq(2,", "assert_eq(3,");
        let out = run_test(&program(), &test_fn(&src), ExecOptions::default());
        assert!(matches!(out.status, TestStatus::AssertionFailure { .. }), "{:?}", out.status);
    }

    #[test]
    fn divergence_hits_budget() {
        let test = test_fn("fn test_loop() { while (true) { } }");
        let out = run_test(&program(), &test, ExecOptions::default());
        assert_eq!(out.status, TestStatus::StepBudgetExceeded);
    }

    #[test]
    fn observes_emptied_list() {
        let test = test_fn(
            "fn test_t() { let tl = new TreeList(); tl.add(1); tl.add(2); tl.remove_all(); observe(); }",
        );
        let out = run_instrumented(&program(), &test, ExecOptions::default());
        assert_eq!(out.status, TestStatus::Pass);
        let seen: Vec<_> = out.observations.iter().map(|o| (o.subject.as_str(), o.getter.as_str(), o.value.clone())).collect();
        assert_eq!(
            seen,
            vec![("tl", "is_empty", ObservedValue::Bool(true)), ("tl", "size", ObservedValue::Int(0))]
        );
        let ids: Vec<u32> = out.observations.iter().map(|o| o.point_id).collect();
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn observation_is_inert_without_instrumentation() {
        let test = test_fn("fn test_t() { let tl = new TreeList(); observe(); }");
        assert!(run_test(&program(), &test, ExecOptions::default()).observations.is_empty());
    }

    #[test]
    fn no_objects_no_observations() {
        let test = test_fn("fn test_t() { let x = 1; observe(); }");
        assert!(run_instrumented(&program(), &test, ExecOptions::default()).observations.is_empty());
    }

    #[test]
    fn records_throwing_statement() {
        let test = test_fn("fn test_t() { let tl = new TreeList(); tl.add(1); tl.get(5); }");
        let out = run_test(&program(), &test, ExecOptions::default());
        assert!(matches!(out.status, TestStatus::RuntimeError { .. }), "{:?}", out.status);
        assert_eq!(out.thrown_at, Some(2));
    }

    #[test]
    fn assert_throws_matches_message() {
        let p = program();
        let ok = test_fn("fn test_t() { let tl = new TreeList(); assert_throws(\"index out of range\") { tl.get(0); } }");
        assert_eq!(run_test(&p, &ok, ExecOptions::default()).status, TestStatus::Pass);
        let bad = test_fn("fn test_t() { let tl = new TreeList(); assert_throws(\"other\") { tl.get(0); } }");
        assert!(matches!(run_test(&p, &bad, ExecOptions::default()).status, TestStatus::AssertionFailure { .. }));
    }

    #[test]
    fn overflow_is_an_error() {
        let test = test_fn("fn test_t() { let x = 9223372036854775807; x += 1; }");
        let out = run_test(&program(), &test, ExecOptions::default());
        assert!(matches!(out.status, TestStatus::RuntimeError { ref message, .. } if message == "integer overflow"));
    }

    #[test]
    fn coverage_of_nothing_is_empty() {
        assert!(covered_statements(&program(), [], ExecOptions::default()).is_empty());
    }

    #[test]
    fn random_is_seeded() {
        let src = "class R { pub fn get_roll() -> int { return random(1000); } }";
        let p = Program::new(parse_module(src, "r.mini").unwrap()).unwrap();
        let test = test_fn("fn test_t() { let r = new R(); observe(); }");
        let a = run_instrumented(&p, &test, ExecOptions { seed: 7, ..Default::default() });
        let b = run_instrumented(&p, &test, ExecOptions { seed: 7, ..Default::default() });
        assert_eq!(a, b);
    }
}

//! The amplification loop: explore inputs, regenerate assertions, and keep
//! the candidates that kill mutants nothing else kills yet.

mod select;

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;

use crate::amplify::{apply_all, generate_assertions, strip_assertions, AmplifierKind};
use crate::interp::{run_test, ExecOptions, DEFAULT_BUDGET};
use crate::mutation::{BaselineRedError, MutationAnalyzer, MutationReport};
use crate::program::Program;
use crate::seed::derive_seed;
use crate::syntax::{MethodDecl, TestMethod};

pub use select::{rank_order, select_focused, FocusInput, Focused};

// Stream tags for `derive_seed`.
const EXEC_STREAM: u64 = 0;
const INPUT_STREAM: u64 = 1;
const FLAKY_STREAM: u64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmplificationConfig {
    pub iterations: usize,
    /// Executions of each candidate used to detect flakiness.
    pub reruns: usize,
    pub seed: u64,
    pub amplifiers: BTreeSet<AmplifierKind>,
    /// Candidates kept per iteration and test.
    pub cap: usize,
    pub budget: u64,
}

impl Default for AmplificationConfig {
    fn default() -> Self {
        Self {
            iterations: 3,
            reruns: 3,
            seed: 0,
            amplifiers: AmplifierKind::ALL.into_iter().collect(),
            cap: 200,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl AmplificationConfig {
    /// Options for the runs that produce and check assertions.
    pub fn exec_options(&self) -> ExecOptions {
        ExecOptions { budget: self.budget, seed: derive_seed(self.seed, &[EXEC_STREAM]) }
    }
}

/// An amplified test that killed at least one mutant first.
#[derive(Clone, Debug, PartialEq)]
pub struct AcceptedTest {
    pub test: TestMethod,
    /// Indices of the mutants credited to this test, ascending.
    pub new_killed: Vec<usize>,
    /// 0 for assertion amplification of the original test.
    pub generation: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub candidates: usize,
    pub discarded: usize,
    pub flaky: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub baseline: MutationReport,
    pub accepted: Vec<AcceptedTest>,
    /// Mutant indices killed by the suite plus the accepted tests.
    pub killed_after: BTreeSet<usize>,
    pub stats: Stats,
}

/// True when any of `reruns` executions under fresh seeds fails.
pub fn is_flaky(test: &MethodDecl, program: &Program, reruns: usize, budget: u64, seed: u64) -> bool {
    (0..reruns as u64).any(|r| {
        let opts = ExecOptions { budget, seed: derive_seed(seed, &[r]) };
        !run_test(program, test, opts).status.is_pass()
    })
}

struct Root<'a> {
    index: usize,
    test: &'a TestMethod,
    parents: Vec<TestMethod>,
    seen: HashSet<String>,
    accepted: usize,
    serial: u64,
}

enum Verdict {
    Flaky,
    Kills(Vec<usize>),
}

/// Amplifies every test of `suite`. The analyzer fixes the program, the
/// mutant list and the execution options of mutation runs.
pub fn amplify_suite(
    analyzer: &MutationAnalyzer,
    suite: &[TestMethod],
    cfg: &AmplificationConfig,
) -> Result<SuiteOutcome, BaselineRedError> {
    let program = analyzer.program();
    let decls: Vec<MethodDecl> = suite.iter().map(|t| t.decl.clone()).collect();
    let baseline = analyzer.analyze(&decls)?;
    let mut killed = baseline.killed_indices();
    let mut accepted = Vec::new();
    let mut stats = Stats::default();
    let opts = cfg.exec_options();

    let mut roots: Vec<Root> = suite
        .iter()
        .enumerate()
        .map(|(index, test)| Root { index, test, parents: Vec::new(), seen: HashSet::new(), accepted: 0, serial: 0 })
        .collect();

    // Assertion amplification of every original test comes first, so its
    // improvers do not depend on which input amplifiers are enabled.
    let generated: Vec<_> = suite.par_iter().map(|t| generate_assertions(t, program, opts)).collect();
    let mut batch = Vec::new();
    for (root, result) in roots.iter_mut().zip(generated) {
        root.seen.insert(crate::amplify::body_key(&strip_assertions(&root.test.decl)));
        stats.candidates += 1;
        match result {
            Ok(u) => {
                root.seen.insert(crate::amplify::body_key(&strip_assertions(&u.decl)));
                root.parents.push(u.clone());
                batch.push((root.index, u));
            }
            Err(_) => {
                stats.discarded += 1;
                root.parents.push(root.test.clone());
            }
        }
    }
    evaluate(analyzer, cfg, &mut roots, batch, 0, &mut killed, &mut accepted, &mut stats);

    for r in 0..roots.len() {
        for iteration in 1..=cfg.iterations {
            let root = &mut roots[r];
            if root.parents.is_empty() {
                break;
            }
            let seed = derive_seed(cfg.seed, &[INPUT_STREAM, root.index as u64, iteration as u64]);
            let mut v = apply_all(&root.parents, program, seed, &cfg.amplifiers, iteration);
            v.retain(|c| root.seen.insert(crate::amplify::body_key(&c.test.decl)));
            if v.len() > cfg.cap {
                let mut order: Vec<usize> = (0..v.len()).collect();
                order.sort_by_key(|&i| (v[i].test.ledger().len(), i));
                let keep: HashSet<usize> = order.into_iter().take(cfg.cap).collect();
                v = v.into_iter().enumerate().filter(|(i, _)| keep.contains(i)).map(|(_, c)| c).collect();
            }
            stats.candidates += v.len();
            let generated: Vec<_> = v.par_iter().map(|c| generate_assertions(&c.test, program, opts)).collect();
            let survivors: Vec<TestMethod> = generated.into_iter().filter_map(Result::ok).collect();
            stats.discarded += v.len() - survivors.len();
            root.parents = survivors.clone();
            let batch = survivors.into_iter().map(|t| (r, t)).collect();
            evaluate(analyzer, cfg, &mut roots, batch, iteration, &mut killed, &mut accepted, &mut stats);
        }
    }

    Ok(SuiteOutcome { baseline, accepted, killed_after: killed, stats })
}

/// Flakiness and kill sets are computed in parallel; acceptance is a fold in
/// batch order so that credit for a mutant goes to the first killer.
#[allow(clippy::too_many_arguments)]
fn evaluate(
    analyzer: &MutationAnalyzer,
    cfg: &AmplificationConfig,
    roots: &mut [Root],
    batch: Vec<(usize, TestMethod)>,
    generation: usize,
    killed: &mut BTreeSet<usize>,
    accepted: &mut Vec<AcceptedTest>,
    stats: &mut Stats,
) {
    let program = analyzer.program();
    let opts = cfg.exec_options();
    let open: Vec<usize> = (0..analyzer.mutants().len()).filter(|i| !killed.contains(i)).collect();
    let seeds: Vec<u64> = batch
        .iter()
        .map(|(r, _)| {
            let root = &mut roots[*r];
            root.serial += 1;
            derive_seed(cfg.seed, &[FLAKY_STREAM, root.index as u64, root.serial])
        })
        .collect();
    let verdicts: Vec<Option<Verdict>> = batch
        .par_iter()
        .zip(&seeds)
        .map(|((_, test), &seed)| {
            if test.ledger().is_empty() {
                return None;
            }
            if is_flaky(&test.decl, program, cfg.reruns, cfg.budget, seed) {
                return Some(Verdict::Flaky);
            }
            let coverage = run_test(program, &test.decl, opts).coverage;
            Some(Verdict::Kills(analyzer.killed_by(&test.decl, &coverage, &open)))
        })
        .collect();
    for ((r, test), verdict) in batch.into_iter().zip(verdicts) {
        match verdict {
            None => {}
            Some(Verdict::Flaky) => stats.flaky += 1,
            Some(Verdict::Kills(kills)) => {
                let new: Vec<usize> = kills.into_iter().filter(|i| !killed.contains(i)).collect();
                if new.is_empty() {
                    continue;
                }
                killed.extend(&new);
                let root = &mut roots[r];
                root.accepted += 1;
                let mut test = test;
                test.decl.name = format!("{}_amp{}", root.test.name(), root.accepted);
                accepted.push(AcceptedTest { test, new_killed: new, generation });
            }
        }
    }
}

/// Selection input for the accepted tests of an outcome.
pub fn focus_inputs(analyzer: &MutationAnalyzer, accepted: &[AcceptedTest]) -> Vec<FocusInput> {
    accepted
        .iter()
        .map(|a| FocusInput {
            name: a.test.name().to_string(),
            ledger_len: a.test.ledger().len(),
            kill_methods: a.new_killed.iter().map(|&i| analyzer.mutants()[i].method_path()).collect(),
        })
        .collect()
}

//! Acceptance suite. Prints one line per criterion and fails if any
//! criterion fails. Pass criterion numbers as arguments to run a subset.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use ampforge_core::interp::{run_test, ExecOptions};
use ampforge_core::mutation::{enumerate_mutants, increase_killed_counts, mutation_score, MutationAnalyzer, MutationReport, Operator};
use ampforge_core::orchestrator::{amplify_suite, rank_order, select_focused, AmplificationConfig, FocusInput, SuiteOutcome};
use ampforge_core::program::Program;
use ampforge_core::project::Project;
use ampforge_core::report::{build_report, AmplificationReport, Patch};
use ampforge_core::syntax::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Verdict = Result<String, String>;

fn main() {
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(u32, &str, fn() -> Verdict); 10] = [
        (1, "golden TreeList scenario", c1_golden),
        (2, "metric oracle against published rows", c2_metrics),
        (3, "mutant determinism and brute-force enumeration", c3_mutants),
        (4, "kill matrix equals exhaustive oracle", c4_kill_matrix),
        (5, "monotonicity over seeded runs", c5_monotonic),
        (6, "flaky elimination", c6_flaky),
        (7, "focused selection properties", c7_selection),
        (8, "assertion-only mode", c8_a_only),
        (9, "end-to-end determinism across thread counts", c9_determinism),
        (10, "patch hygiene", c10_patches),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, title, check) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let verdict = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {n:>2} PASS  {title}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {title}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

// ---------------------------------------------------------------- helpers

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sample(name: &str) -> PathBuf {
    repo().join("samples").join(name)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn ampforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ampforge")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

struct Run {
    project: Project,
    analyzer: MutationAnalyzer,
    outcome: SuiteOutcome,
    after: MutationReport,
    report: AmplificationReport,
    patches: Vec<Patch>,
}

fn config(seed: u64) -> AmplificationConfig {
    AmplificationConfig { seed, ..AmplificationConfig::default() }
}

fn amplify(dir: &Path, cfg: &AmplificationConfig) -> Run {
    let project = Project::load(dir, None).expect("project loads");
    let analyzer = MutationAnalyzer::new(project.program.clone(), cfg.exec_options());
    let suite: Vec<_> = project.tests().cloned().collect();
    let outcome = amplify_suite(&analyzer, &suite, cfg).expect("baseline is green");
    let mut decls: Vec<MethodDecl> = suite.iter().map(|t| t.decl.clone()).collect();
    decls.extend(outcome.accepted.iter().map(|a| a.test.decl.clone()));
    let after = analyzer.analyze(&decls).expect("accepted tests pass");
    let (report, patches) = build_report(&project, &analyzer, &outcome, &after, cfg);
    Run { project, analyzer, outcome, after, report, patches }
}

/// Body text with the name blanked, for comparing tests across runs.
fn body_text(decl: &MethodDecl) -> String {
    let mut d = decl.clone();
    d.name = String::new();
    pretty_print(&d)
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .map(|rd| {
            rd.map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

fn copy_tree(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}

/// Applies a patch strictly. It must only touch files under `tests/`.
fn apply_patch(project_dir: &Path, text: &str) -> Result<(String, String), String> {
    let patch = diffy::Patch::from_str(text).map_err(|e| format!("unparsable patch: {e}"))?;
    let original = patch.original().ok_or("patch names no original file")?;
    let modified = patch.modified().ok_or("patch names no modified file")?;
    let rel = original.strip_prefix("a/").ok_or("original path lacks a/")?;
    ensure!(modified.strip_prefix("b/") == Some(rel), "patch renames {original} to {modified}");
    ensure!(rel.starts_with("tests/") && !rel.contains(".."), "patch touches {rel} outside tests/");
    let source = fs::read_to_string(project_dir.join(rel)).map_err(|e| format!("{rel}: {e}"))?;
    let patched = diffy::apply(&source, &patch).map_err(|e| format!("{rel} does not apply: {e}"))?;
    Ok((rel.to_string(), patched))
}

/// Applies every patch of a run, each to a fresh copy, and runs the whole
/// patched suite on the original program.
fn check_patches(project_dir: &Path, patches: &[(String, String)]) -> Result<usize, String> {
    let mut tests_run = 0;
    for (name, text) in patches {
        let tmp = tempfile::tempdir().unwrap();
        copy_tree(project_dir, tmp.path());
        let (rel, patched) = apply_patch(project_dir, text).map_err(|e| format!("{name}: {e}"))?;
        fs::write(tmp.path().join(&rel), patched).unwrap();
        let project = Project::load(tmp.path(), None).map_err(|e| format!("{name}: patched project fails to load: {e}"))?;
        for t in project.tests() {
            let status = run_test(&project.program, &t.decl, ExecOptions::default()).status;
            ensure!(status.is_pass(), "{name}: {} fails after patching: {status:?}", t.name());
            tests_run += 1;
        }
    }
    Ok(tests_run)
}

fn patch_texts(run: &Run) -> Vec<(String, String)> {
    run.patches.iter().map(|p| (p.file_name.clone(), p.diff.clone())).collect()
}

// ------------------------------------------------------------- criterion 1

fn c1_golden() -> Verdict {
    let golden = sample("treelist/golden");
    let seed = fs::read_to_string(golden.join("SEED")).map_err(|e| e.to_string())?.trim().to_string();
    let out = tempfile::tempdir().unwrap();
    let patches = out.path().join("patches");
    let start = Instant::now();
    let o = ampforge(&["amplify", path_str(&sample("treelist")), "--seed", &seed, "--patches", path_str(&patches)]);
    let secs = start.elapsed().as_secs_f64();
    ensure!(o.status.success(), "amplify failed: {}", String::from_utf8_lossy(&o.stderr));
    ensure!(secs < 60.0, "took {secs:.1}s");
    let expected: Vec<_> = read_dir_sorted(&golden).into_iter().filter(|(n, _)| n.ends_with(".patch")).collect();
    let got = read_dir_sorted(&patches);
    ensure!(got == expected, "emitted patches differ from the golden patches");
    let (name, text) = expected
        .iter()
        .map(|(n, t)| (n, String::from_utf8_lossy(t).into_owned()))
        .find(|(_, t)| t.contains("+  tl.remove_all();"))
        .ok_or("no golden patch adds a call on `tl`")?;
    ensure!(text.contains("+  assert_eq(0, tl.size());"), "{name} lacks the emptied-size assertion");
    ensure!(text.contains("+  assert_true(tl.is_empty());"), "{name} lacks the emptiness assertion");
    // The asserted values are the observed ones: the patched test passes.
    check_patches(&sample("treelist"), &[(name.clone(), text.clone())])?;
    Ok(format!("seed {seed}, {} patches match, {name} asserts observed values, {secs:.2}s", got.len()))
}

// ------------------------------------------------------------- criterion 2

fn c2_metrics() -> Verdict {
    // (killed original, killed amplified, published increase in percent).
    let increases = [
        (599, 715, 19.0),
        (455, 534, 17.0),
        (162, 164, 1.0),
        (51, 54, 5.0),
        (42, 47, 11.0),
        (104, 105, 0.97),
        (576, 647, 12.0),
        (141, 156, 10.0),
        (152, 165, 8.0),
        (309, 336, 8.0),
        (381, 384, 0.79),
        (66, 90, 36.0),
        (573, 686, 19.0),
        (143, 148, 3.0),
        (223, 316, 41.0),
        (214, 293, 36.0),
        (78, 249, 219.0),
        (97, 325, 235.0),
        (18, 27, 50.0),
        (52, 275, 428.0),
        (210, 342, 62.0),
        (383, 475, 24.0),
        (178, 225, 26.0),
        (316, 322, 1.0),
        (108, 166, 53.0),
        (642, 644, 0.32),
    ];
    for (orig, ampl, published) in increases {
        let pct = increase_killed_counts(orig, ampl).map_err(|e| e.to_string())? * 100.0;
        // Published figures are truncated, sometimes rounded.
        ensure!((pct - published).abs() < 1.0, "increase_killed({orig}, {ampl}) = {pct:.2}%, published {published}%");
    }
    ensure!((increase_killed_counts(599, 715).unwrap() * 100.0).round() == 19.0, "599 -> 715 does not round to 19%");
    ensure!((increase_killed_counts(97, 325).unwrap() * 100.0).round() == 235.0, "97 -> 325 does not round to 235%");
    // (killed, executed, published score). Only 464/489 is given with its
    // executed count; the others use the smallest executed count consistent
    // with the published percentage.
    let scores = [(464, 489, 95.0), (599, 1198, 50.0), (79, 91, 87.0), (455, 785, 58.0), (97, 1213, 8.0)];
    for (killed, executed, published) in scores {
        let s = mutation_score(killed, executed);
        ensure!(s.round() == published, "mutation_score({killed}, {executed}) = {s:.2}, published {published}");
    }
    ensure!(increase_killed_counts(0, 5).is_err(), "increase over zero kills must be undefined");
    Ok(format!("{} increase rows and {} score rows agree", increases.len(), scores.len()))
}

// ------------------------------------------------------------- criterion 3

/// Independent enumeration: walk every node and test each operator's
/// applicability directly.
fn brute_force_mutants(program: &Program) -> Vec<(String, u32, u32, Operator, String)> {
    struct Walk<'a> {
        program: &'a Program,
        method: String,
        returns: Option<Type>,
        out: Vec<(String, u32, u32, Operator, String)>,
    }
    impl Walk<'_> {
        fn add(&mut self, pos: &SourcePos, op: Operator) {
            self.out.push((pos.file.to_string(), pos.line, pos.col, op, self.method.clone()));
        }
        fn stmts(&mut self, body: &[Stmt]) {
            for s in body {
                self.stmt(s);
            }
        }
        fn stmt(&mut self, s: &Stmt) {
            match &s.kind {
                StmtKind::CompoundAssign { target, value, .. } => {
                    self.add(&s.meta.pos, Operator::Increments);
                    self.expr(target);
                    self.expr(value);
                }
                StmtKind::Return(Some(e)) => {
                    let nullable = matches!(self.returns, Some(Type::List | Type::Class(_)));
                    if self.returns.is_some() && !(nullable && matches!(e.kind, ExprKind::Null)) {
                        self.add(&s.meta.pos, Operator::ReturnValues);
                    }
                    self.expr(e);
                }
                StmtKind::Expr(e) => {
                    if matches!(e.kind, ExprKind::Call { .. }) && *self.program.types().expr(e) == StaticType::Void {
                        self.add(&s.meta.pos, Operator::VoidMethodCalls);
                    }
                    self.expr(e);
                }
                StmtKind::VarDecl { init, .. } => self.expr(init),
                StmtKind::Assign { target, value } => {
                    self.expr(target);
                    self.expr(value);
                }
                StmtKind::If { cond, then_block, else_block } => {
                    self.expr(cond);
                    self.stmts(then_block);
                    self.stmts(else_block.as_deref().unwrap_or(&[]));
                }
                StmtKind::While { cond, body } => {
                    self.expr(cond);
                    self.stmts(body);
                }
                StmtKind::Throw(e) => self.expr(e),
                StmtKind::AssertThrows { body, .. } => self.stmts(body),
                StmtKind::Return(None) => {}
            }
        }
        fn expr(&mut self, e: &Expr) {
            match &e.kind {
                ExprKind::Binary { op, lhs, rhs } => {
                    use BinaryOp::*;
                    if matches!(op, Lt | Le | Gt | Ge) {
                        self.add(&e.meta.pos, Operator::ConditionalsBoundary);
                    }
                    let int = *self.program.types().expr(e) == StaticType::Int;
                    if matches!(op, Sub | Mul | Div | Rem) || (*op == Add && int) {
                        self.add(&e.meta.pos, Operator::Math);
                    }
                    if matches!(op, Eq | Ne | Lt | Le | Gt | Ge) {
                        self.add(&e.meta.pos, Operator::NegateConditionals);
                    }
                    self.expr(lhs);
                    self.expr(rhs);
                }
                ExprKind::Unary { op, operand } => {
                    if *op == UnaryOp::Neg && matches!(operand.kind, ExprKind::Var(_) | ExprKind::Field { .. }) {
                        self.add(&e.meta.pos, Operator::InvertNegatives);
                    }
                    self.expr(operand);
                }
                ExprKind::Call { receiver, args, .. } => {
                    if let Some(r) = receiver {
                        self.expr(r);
                    }
                    args.iter().for_each(|a| self.expr(a));
                }
                ExprKind::New { args, .. } => args.iter().for_each(|a| self.expr(a)),
                ExprKind::Field { receiver, .. } => self.expr(receiver),
                _ => {}
            }
        }
    }
    let mut w = Walk { program, method: String::new(), returns: None, out: Vec::new() };
    let module = program.module();
    for class in &module.classes {
        for m in class.ctor.iter().chain(&class.methods) {
            w.method = format!("{}.{}", class.name, m.name);
            w.returns = m.return_type.clone();
            w.stmts(&m.body);
        }
    }
    for f in &module.functions {
        w.method = f.name.clone();
        w.returns = f.return_type.clone();
        w.stmts(&f.body);
    }
    w.out.sort();
    w.out
}

fn count_statements(module: &Module) -> usize {
    fn count(body: &[Stmt]) -> usize {
        body.iter()
            .map(|s| {
                1 + match &s.kind {
                    StmtKind::If { then_block, else_block, .. } => count(then_block) + else_block.as_deref().map_or(0, count),
                    StmtKind::While { body, .. } | StmtKind::AssertThrows { body, .. } => count(body),
                    _ => 0,
                }
            })
            .sum()
    }
    module.classes.iter().flat_map(|c| c.ctor.iter().chain(&c.methods)).chain(&module.functions).map(|m| count(&m.body)).sum()
}

fn c3_mutants() -> Verdict {
    let dir = sample("treelist");
    let mut lists = BTreeSet::new();
    for _ in 0..10 {
        let o = ampforge(&["mutate", path_str(&dir)]);
        ensure!(o.status.success(), "mutate failed: {}", String::from_utf8_lossy(&o.stderr));
        let json: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
        lists.insert(serde_json::to_vec(&json["mutants"]).unwrap());
    }
    ensure!(lists.len() == 1, "{} distinct mutant lists over 10 runs", lists.len());

    let project = Project::load(&fixture("stats"), None).map_err(|e| e.to_string())?;
    let statements = count_statements(project.program.module());
    ensure!(statements <= 50, "fixture has {statements} statements");
    let mutants = enumerate_mutants(&project.program);
    let mut engine: Vec<_> = mutants
        .iter()
        .map(|m| (m.pos.file.to_string(), m.pos.line, m.pos.col, m.operator, m.method_path()))
        .collect();
    engine.sort();
    let oracle = brute_force_mutants(&project.program);
    ensure!(engine == oracle, "engine {engine:?}\noracle {oracle:?}");
    let ids: BTreeSet<_> = mutants.iter().map(|m| &m.id).collect();
    ensure!(ids.len() == mutants.len(), "duplicate mutant ids");
    for m in &mutants {
        let mutated = m.apply(project.program.module());
        ensure!(pretty_print(&mutated) != pretty_print(project.program.module()), "{} changes nothing", m.id);
    }
    let operators: BTreeSet<_> = mutants.iter().map(|m| m.operator).collect();
    ensure!(operators.len() == 7, "fixture exercises only {operators:?}");
    Ok(format!("10 identical lists; {} mutants over {statements} statements match the oracle", mutants.len()))
}

// ------------------------------------------------------------- criterion 4

fn c4_kill_matrix() -> Verdict {
    let start = Instant::now();
    let project = Project::load(&fixture("stats"), None).map_err(|e| e.to_string())?;
    let tests: Vec<MethodDecl> = project.tests().map(|t| t.decl.clone()).collect();
    ensure!(tests.len() <= 5, "fixture has {} tests", tests.len());
    let opts = ExecOptions::default();
    let analyzer = MutationAnalyzer::new(project.program.clone(), opts);
    let report = analyzer.analyze(&tests).map_err(|e| e.to_string())?;
    let mut cells = 0;
    for (m, result) in analyzer.mutants().iter().zip(&report.results) {
        // Rebuilt and re-checked from source, independent of the engine's
        // own mutated programs.
        let mutated = Program::new(m.apply(project.program.module())).map_err(|e| format!("{}: {e}", m.id))?;
        let oracle: Vec<String> = tests
            .iter()
            .filter(|t| !run_test(&mutated, t, opts).status.is_pass())
            .map(|t| t.name.clone())
            .collect();
        cells += tests.len();
        ensure!(oracle == result.killing_tests, "{}: oracle {oracle:?}, engine {:?}", m.id, result.killing_tests);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.1}s");
    Ok(format!("{cells} cells over {} mutants and {} tests agree", report.results.len(), tests.len()))
}

// ------------------------------------------------------------- criterion 5

fn c5_monotonic() -> Verdict {
    let mut runs = 0;
    let mut growing = 0;
    for name in ["treelist", "counter", "account"] {
        for seed in 0..100 {
            let run = amplify(&sample(name), &config(seed));
            let before = run.outcome.baseline.killed_indices();
            let after = run.after.killed_indices();
            ensure!(after.is_superset(&before), "{name} seed {seed}: kills lost");
            ensure!(after == run.outcome.killed_after, "{name} seed {seed}: re-analysis disagrees with the loop");
            if run.outcome.accepted.is_empty() {
                ensure!(after.len() == before.len(), "{name} seed {seed}: kills grew without tests");
            } else {
                ensure!(after.len() > before.len(), "{name} seed {seed}: tests accepted, no new kills");
                growing += 1;
            }
            let mut credited = before.clone();
            for a in &run.outcome.accepted {
                ensure!(!a.new_killed.is_empty(), "{name} seed {seed}: {} kills nothing new", a.test.name());
                for k in &a.new_killed {
                    ensure!(credited.insert(*k), "{name} seed {seed}: mutant {k} credited twice");
                    let outcome = run.analyzer.run_on_mutant(*k, &a.test.decl);
                    ensure!(!outcome.status.is_pass(), "{name} seed {seed}: {} does not kill {k}", a.test.name());
                }
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, {growing} with new tests, none lost kills"))
}

// ------------------------------------------------------------- criterion 6

const RANDOM_GETTERS: [&str; 6] = ["get_face", "get_side", "get_toss", "is_heads", "is_lucky", "is_tails"];

fn c6_flaky() -> Verdict {
    let runs = 100;
    let mut clean = 0;
    let mut flaky_seen = 0;
    let mut candidates = 0;
    for seed in 0..runs {
        let cfg = AmplificationConfig { reruns: 3, ..config(seed) };
        let run = amplify(&sample("coin"), &cfg);
        flaky_seen += run.outcome.stats.flaky;
        candidates += run.outcome.stats.candidates;
        let survivors = run
            .outcome
            .accepted
            .iter()
            .filter(|a| {
                (0..64).any(|r| {
                    let opts = ExecOptions { budget: cfg.budget, seed: 1_000_003 * seed + r };
                    !run_test(run.analyzer.program(), &a.test.decl, opts).status.is_pass()
                })
            })
            .count();
        if survivors == 0 {
            clean += 1;
        }
        for p in &run.patches {
            ensure!(
                !RANDOM_GETTERS.iter().any(|g| p.diff.contains(&format!("{g}()"))),
                "seed {seed}: {} asserts on a random getter",
                p.file_name
            );
        }
    }
    ensure!(flaky_seen > 0, "no flaky candidate was ever generated");
    let rate = clean as f64 / runs as f64;
    ensure!(rate >= 0.95, "flaky candidates eliminated in {clean}/{runs} runs");
    Ok(format!("eliminated in {clean}/{runs} runs; {flaky_seen} flaky of {candidates} candidates discarded"))
}

// ------------------------------------------------------------- criterion 7

fn reference_key(t: &FocusInput) -> (f64, usize) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for m in &t.kill_methods {
        *counts.entry(m).or_default() += 1;
    }
    (t.kill_methods.len() as f64 / t.ledger_len.max(1) as f64, counts.values().copied().max().unwrap_or(0))
}

fn reference_rank(inputs: &[FocusInput]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, ma) = reference_key(&inputs[a]);
        let (rb, mb) = reference_key(&inputs[b]);
        rb.partial_cmp(&ra).unwrap().then(mb.cmp(&ma)).then(inputs[a].name.cmp(&inputs[b].name))
    });
    order
}

fn focus_inputs_strategy() -> impl Strategy<Value = Vec<FocusInput>> {
    let input = (0usize..6, prop::collection::vec(0usize..4, 0..8));
    prop::collection::vec(input, 0..8).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (ledger_len, kills))| FocusInput {
                name: format!("t{}", (i * 7) % 10),
                ledger_len,
                kill_methods: kills.into_iter().map(|k| format!("C.m{k}")).collect(),
            })
            .collect()
    })
}

fn c7_selection() -> Verdict {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner
        .run(&focus_inputs_strategy(), |inputs| {
            let mut order: Vec<usize> = (0..inputs.len()).collect();
            order.sort_by(|&a, &b| rank_order(&inputs[a], &inputs[b]));
            let reference = reference_rank(&inputs);
            let keys = |o: &[usize]| o.iter().map(|&i| (reference_key(&inputs[i]), inputs[i].name.clone())).collect::<Vec<_>>();
            prop_assert_eq!(keys(&order), keys(&reference));

            let focused = select_focused(&inputs);
            let methods: BTreeSet<_> = focused.iter().map(|f| f.focus_method.clone()).collect();
            prop_assert_eq!(methods.len(), focused.len());
            let positions: Vec<usize> = focused.iter().map(|f| order.iter().position(|&i| i == f.index).unwrap()).collect();
            prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
            for f in &focused {
                prop_assert!(f.focus_ratio >= 0.5);
                let t = &inputs[f.index];
                let n = t.kill_methods.iter().filter(|m| **m == f.focus_method).count();
                prop_assert_eq!(f.focus_ratio, n as f64 / t.kill_methods.len() as f64);
            }
            // A skipped test has no unclaimed method holding half its kills.
            let mut claimed = BTreeSet::new();
            for &i in &order {
                let t = &inputs[i];
                match focused.iter().find(|f| f.index == i) {
                    Some(f) => {
                        claimed.insert(f.focus_method.clone());
                    }
                    None => {
                        let total = t.kill_methods.len();
                        for m in &t.kill_methods {
                            let n = t.kill_methods.iter().filter(|x| *x == m).count();
                            prop_assert!(n * 2 < total || claimed.contains(m));
                        }
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let mut emitted = 0;
    for name in ["treelist", "counter", "account"] {
        for seed in 0..10 {
            let run = amplify(&sample(name), &config(seed));
            let mut seen = BTreeSet::new();
            for t in run.report.tests.iter().filter(|t| t.focus_method.is_some()) {
                let ratio = t.focus_ratio.unwrap();
                ensure!(ratio >= 0.5, "{name} seed {seed}: {} has ratio {ratio}", t.name);
                ensure!(seen.insert(t.focus_method.clone()), "{name} seed {seed}: focus method repeated");
                emitted += 1;
            }
        }
    }
    Ok(format!("1000 random rankings match the reference; {emitted} emitted selections checked"))
}

// ------------------------------------------------------------- criterion 8

fn c8_a_only() -> Verdict {
    for name in ["treelist", "counter", "account"] {
        for seed in 0..10 {
            let full = amplify(&sample(name), &config(seed));
            let a_only = amplify(&sample(name), &AmplificationConfig { amplifiers: BTreeSet::new(), ..config(seed) });
            let improvers: BTreeSet<(String, String)> = full
                .outcome
                .accepted
                .iter()
                .filter(|a| a.test.ledger().iter().all(|m| m.kind == ModificationKind::AssertionAdded))
                .map(|a| (a.test.root_name().to_string(), body_text(&a.test.decl)))
                .collect();
            for a in &a_only.outcome.accepted {
                let key = (a.test.root_name().to_string(), body_text(&a.test.decl));
                ensure!(improvers.contains(&key), "{name} seed {seed}: A-only test {} missing from full mode", a.test.name());
            }
        }
    }
    let mut full_kills = usize::MAX;
    for seed in 0..10 {
        let a_only = amplify(&sample("counter"), &AmplificationConfig { amplifiers: BTreeSet::new(), ..config(seed) });
        let full = amplify(&sample("counter"), &config(seed));
        let a_new: usize = a_only.outcome.accepted.iter().map(|a| a.new_killed.len()).sum();
        let full_new: usize = full.outcome.accepted.iter().map(|a| a.new_killed.len()).sum();
        ensure!(a_new == 0, "seed {seed}: A-only killed {a_new} new mutants on counter");
        ensure!(full_new >= 1, "seed {seed}: full mode killed nothing new on counter");
        full_kills = full_kills.min(full_new);
    }
    Ok(format!("A-only output contained in full mode on 3 projects; counter: 0 vs >= {full_kills} new kills"))
}

// ------------------------------------------------------------- criterion 9

fn c9_determinism() -> Verdict {
    let mut compared = 0;
    for name in ["treelist", "account", "coin"] {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "1", "4"] {
            let dir = tempfile::tempdir().unwrap();
            let report = dir.path().join("report.json");
            let patches = dir.path().join("patches");
            let o = ampforge(&[
                "amplify",
                path_str(&sample(name)),
                "--seed",
                "11",
                "--threads",
                threads,
                "--out",
                path_str(&report),
                "--patches",
                path_str(&patches),
            ]);
            ensure!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
            outputs.push((fs::read(&report).unwrap(), read_dir_sorted(&patches), o.stdout));
        }
        ensure!(outputs.windows(2).all(|w| w[0] == w[1]), "{name}: outputs differ between runs");
        compared += outputs.len();
    }
    Ok(format!("{compared} runs on 3 projects, 1 and 4 threads, byte-identical"))
}

// ------------------------------------------------------------ criterion 10

fn c10_patches() -> Verdict {
    let mut applied = 0;
    let mut tests_run = 0;
    for name in ["treelist", "counter", "account", "coin"] {
        for seed in 0..10 {
            let run = amplify(&sample(name), &config(seed));
            let patches = patch_texts(&run);
            tests_run += check_patches(&run.project.root, &patches).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            applied += patches.len();
        }
    }
    ensure!(applied > 0, "no patch was emitted");
    Ok(format!("{applied} patches applied cleanly; {tests_run} patched-suite test runs green"))
}

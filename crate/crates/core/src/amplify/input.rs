use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::edit::{is_observe, strip_assertions, Edit};
use super::{AmplifierKind, Candidate};
use crate::program::Program;
use crate::seed::derive_seed;
use crate::syntax::visit::{walk_block, walk_expr, walk_stmt, Visit};
use crate::syntax::*;

/// Alphabet of generated characters: printable ASCII.
pub const PRINTABLE: std::ops::RangeInclusive<u8> = 0x20..=0x7e;

fn random_char(rng: &mut impl Rng) -> char {
    rng.gen_range(PRINTABLE) as char
}

fn random_string(rng: &mut impl Rng, len: usize) -> String {
    (0..len).map(|_| random_char(rng)).collect()
}

/// Ledger entries that survive into a child: everything but the assertions,
/// which the child regenerates.
fn carried_ledger(parent: &TestMethod) -> Vec<Modification> {
    parent.ledger().iter().filter(|m| m.kind != ModificationKind::AssertionAdded).cloned().collect()
}

struct Builder<'a> {
    parent: &'a TestMethod,
    base: MethodDecl,
    generation: usize,
    out: Vec<Candidate>,
}

impl<'a> Builder<'a> {
    fn new(parent: &'a TestMethod, generation: usize) -> Self {
        Self { parent, base: strip_assertions(&parent.decl), generation, out: Vec::new() }
    }

    fn push(&mut self, edit: Edit, mods: Vec<Modification>) {
        let Some(decl) = edit.apply(&self.base) else { return };
        let mut ledger = carried_ledger(self.parent);
        ledger.extend(mods);
        let origin = Origin::Amplified { parent: self.parent.root_name().to_string(), ledger };
        self.out.push(Candidate { test: TestMethod { decl, origin }, edit, generation: self.generation });
    }
}

struct Literals<'a>(Vec<&'a Expr>);

impl<'a> Visit<'a> for Literals<'a> {
    fn visit_expr(&mut self, expr: &'a Expr) {
        if expr.is_literal() {
            self.0.push(expr);
        }
        walk_expr(self, expr);
    }
}

fn literals(decl: &MethodDecl) -> Vec<&Expr> {
    let mut v = Literals(Vec::new());
    walk_block(&mut v, &decl.body);
    v.0
}

fn literal_amp(target: &Expr, with: Expr) -> (Edit, Vec<Modification>) {
    let detail = format!("`{}` -> `{}`", expr_text(target), expr_text(&with));
    let m = Modification { kind: ModificationKind::LiteralAmp, target: target.meta.id, detail };
    (Edit::ReplaceExpr { target: target.meta.id, with }, vec![m])
}

/// Variants of every int literal: +1, −1, ×2, ÷2 and another literal value
/// of the test.
pub fn amplify_numeric(test: &TestMethod, rng: &mut impl Rng, generation: usize) -> Vec<Candidate> {
    let mut b = Builder::new(test, generation);
    let base = b.base.clone();
    let lits = literals(&base);
    let mut values: Vec<i64> = Vec::new();
    for e in &lits {
        if let ExprKind::Int(v) = e.kind {
            if !values.contains(&v) {
                values.push(v);
            }
        }
    }
    for e in lits {
        let ExprKind::Int(v) = e.kind else { continue };
        let mut variants: Vec<i64> = [v.checked_add(1), v.checked_sub(1), v.checked_mul(2), Some(v / 2)]
            .into_iter()
            .flatten()
            .collect();
        let others: Vec<i64> = values.iter().copied().filter(|&o| o != v).collect();
        if !others.is_empty() {
            variants.push(others[rng.gen_range(0..others.len())]);
        }
        let mut seen = HashSet::new();
        for n in variants {
            if n != v && seen.insert(n) {
                let (edit, mods) = literal_amp(e, Expr::int(n));
                b.push(edit, mods);
            }
        }
    }
    b.out
}

/// Variants of every string literal. Each gets one-character edits plus a
/// random string of the same length.
pub fn amplify_string(test: &TestMethod, rng: &mut impl Rng, generation: usize) -> Vec<Candidate> {
    let mut b = Builder::new(test, generation);
    let base = b.base.clone();
    for e in literals(&base) {
        let ExprKind::Str(s) = &e.kind else { continue };
        let chars: Vec<char> = s.chars().collect();
        let n = chars.len();
        let mut variants = Vec::new();
        let mut inserted = chars.clone();
        let at = rng.gen_range(0..=n);
        inserted.insert(at, random_char(rng));
        variants.push(inserted);
        if n > 0 {
            let mut deleted = chars.clone();
            deleted.remove(rng.gen_range(0..n));
            variants.push(deleted);
            let mut replaced = chars.clone();
            let at = rng.gen_range(0..n);
            replaced[at] = random_char(rng);
            variants.push(replaced);
        }
        variants.push(random_string(rng, n).chars().collect());
        let mut seen = HashSet::new();
        for v in variants {
            let v: String = v.into_iter().collect();
            if v != *s && seen.insert(v.clone()) {
                let (edit, mods) = literal_amp(e, Expr::new(ExprKind::Str(v)));
                b.push(edit, mods);
            }
        }
    }
    b.out
}

/// One variant per bool literal, with that literal negated.
pub fn amplify_boolean(test: &TestMethod, generation: usize) -> Vec<Candidate> {
    let mut b = Builder::new(test, generation);
    let base = b.base.clone();
    for e in literals(&base) {
        if let ExprKind::Bool(v) = e.kind {
            let (edit, mods) = literal_amp(e, Expr::new(ExprKind::Bool(!v)));
            b.push(edit, mods);
        }
    }
    b.out
}

struct CallStmts<'a>(Vec<&'a Stmt>);

impl<'a> Visit<'a> for CallStmts<'a> {
    fn visit_stmt(&mut self, stmt: &'a Stmt) {
        if let Some(call) = stmt.as_call() {
            if !call.is_assertion_call() && !is_observe(call) {
                self.0.push(stmt);
            }
        }
        walk_stmt(self, stmt);
    }
}

fn call_stmts(decl: &MethodDecl) -> Vec<&Stmt> {
    let mut v = CallStmts(Vec::new());
    walk_block(&mut v, &decl.body);
    v.0
}

fn duplicate_calls(test: &TestMethod, generation: usize) -> Vec<Candidate> {
    let mut b = Builder::new(test, generation);
    let base = b.base.clone();
    for stmt in call_stmts(&base) {
        let target = stmt.meta.id;
        let detail = format!("duplicated `{}`", expr_text(stmt.as_call().expect("call")));
        b.push(Edit::Duplicate { target }, vec![Modification { kind: ModificationKind::CallDuplicated, target, detail }]);
    }
    b.out
}

fn remove_calls(test: &TestMethod, generation: usize) -> Vec<Candidate> {
    let mut b = Builder::new(test, generation);
    let base = b.base.clone();
    for stmt in call_stmts(&base) {
        let target = stmt.meta.id;
        let detail = format!("removed `{}`", expr_text(stmt.as_call().expect("call")));
        b.push(Edit::Remove { target }, vec![Modification { kind: ModificationKind::CallRemoved, target, detail }]);
    }
    b.out
}

/// The class has no constructor usable with generated arguments.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot construct `{0}`")]
pub struct Unconstructible(pub String);

/// `new C()` for a parameterless constructor, `new C(…)` with random
/// primitives when the constructor takes only primitives.
pub fn synthesize_object(class: &str, program: &Program, rng: &mut impl Rng) -> Result<Expr, Unconstructible> {
    let decl = program.class(class).ok_or_else(|| Unconstructible(class.to_string()))?;
    let params = decl.ctor.as_ref().map(|c| c.params.as_slice()).unwrap_or(&[]);
    let mut args = Vec::with_capacity(params.len());
    for p in params {
        args.push(random_primitive(&p.ty, rng).ok_or_else(|| Unconstructible(class.to_string()))?);
    }
    Ok(Expr::new(ExprKind::New { class: class.to_string(), args }))
}

fn random_primitive(ty: &Type, rng: &mut impl Rng) -> Option<Expr> {
    Some(match ty {
        Type::Int => Expr::int(rng.gen_range(-100..=100)),
        Type::Bool => Expr::new(ExprKind::Bool(rng.gen_bool(0.5))),
        Type::Str => Expr::new(ExprKind::Str(random_string(rng, 8))),
        Type::List | Type::Class(_) => return None,
    })
}

/// Appends `v.m(args)` after the last use of each top-level object local
/// `v`, for every public method `m` of its class. Object arguments need
/// `synthesize`.
fn add_calls(test: &TestMethod, program: &Program, rng: &mut impl Rng, synthesize: bool, generation: usize) -> Vec<Candidate> {
    let mut b = Builder::new(test, generation);
    let base = b.base.clone();
    let Ok(types) = program.check_test(&base) else { return Vec::new() };
    for (i, stmt) in base.body.iter().enumerate() {
        let StmtKind::VarDecl { name, .. } = &stmt.kind else { continue };
        let Some(StaticType::Object(class)) = types.locals.get(&stmt.meta.id) else { continue };
        let Some(decl) = program.class(class) else { continue };
        let last_use = (i..base.body.len()).rev().find(|&j| base.body[j].mentions(name)).unwrap_or(i);
        let anchor = base.body[last_use].meta.id;
        'methods: for m in decl.methods.iter().filter(|m| m.is_pub) {
            let mut args = Vec::new();
            let mut mods = Vec::new();
            for p in &m.params {
                let arg = match &p.ty {
                    Type::Int | Type::Bool | Type::Str => random_primitive(&p.ty, rng).expect("primitive"),
                    _ if !synthesize => continue 'methods,
                    Type::List => Expr::new(ExprKind::New { class: "List".into(), args: vec![] }),
                    Type::Class(c) => match synthesize_object(c, program, rng) {
                        Ok(e) => e,
                        Err(_) => continue 'methods,
                    },
                };
                if matches!(arg.kind, ExprKind::New { .. }) {
                    mods.push(Modification {
                        kind: ModificationKind::ObjectSynthesized,
                        target: anchor,
                        detail: format!("synthesized `{}`", expr_text(&arg)),
                    });
                }
                args.push(arg);
            }
            let call = Expr::call(Some(Expr::var(name)), &m.name, args);
            let detail = format!("added `{}`", expr_text(&call));
            mods.insert(0, Modification { kind: ModificationKind::CallAdded, target: anchor, detail });
            b.push(Edit::InsertAfter { anchor, stmt: Stmt::new(StmtKind::Expr(call)) }, mods);
        }
    }
    b.out
}

/// Call duplication, call removal and call addition (with object synthesis).
pub fn amplify_calls(test: &TestMethod, program: &Program, rng: &mut impl Rng, generation: usize) -> Vec<Candidate> {
    let mut out = duplicate_calls(test, generation);
    out.extend(remove_calls(test, generation));
    out.extend(add_calls(test, program, rng, true, generation));
    out
}

/// Runs one amplifier. `enabled` decides whether call addition may
/// synthesize objects.
pub fn apply_kind(
    kind: AmplifierKind,
    test: &TestMethod,
    program: &Program,
    rng: &mut impl Rng,
    enabled: &BTreeSet<AmplifierKind>,
    generation: usize,
) -> Vec<Candidate> {
    match kind {
        AmplifierKind::NumericLiteral => amplify_numeric(test, rng, generation),
        AmplifierKind::StringLiteral => amplify_string(test, rng, generation),
        AmplifierKind::BooleanLiteral => amplify_boolean(test, generation),
        AmplifierKind::CallDuplication => duplicate_calls(test, generation),
        AmplifierKind::CallRemoval => remove_calls(test, generation),
        AmplifierKind::CallAddition => {
            add_calls(test, program, rng, enabled.contains(&AmplifierKind::ObjectSynthesis), generation)
        }
        AmplifierKind::ObjectSynthesis => Vec::new(),
    }
}

/// Canonical text of a body, used as the deduplication key.
pub(crate) fn body_key(decl: &MethodDecl) -> String {
    let mut unnamed = decl.clone();
    unnamed.name.clear();
    pretty_print(&unnamed)
}

/// Every enabled amplifier applied to every test, in input order then
/// amplifier order, structurally deduplicated. Each (test, amplifier) pair
/// draws from its own stream derived from `seed`.
pub fn apply_all(
    tests: &[TestMethod],
    program: &Program,
    seed: u64,
    enabled: &BTreeSet<AmplifierKind>,
    generation: usize,
) -> Vec<Candidate> {
    let per_test: Vec<Vec<Candidate>> = tests
        .par_iter()
        .enumerate()
        .map(|(i, test)| {
            let mut out = Vec::new();
            for kind in enabled {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[i as u64, *kind as u64]));
                out.extend(apply_kind(*kind, test, program, &mut rng, enabled, generation));
            }
            out
        })
        .collect();
    let mut seen = HashSet::new();
    per_test.into_iter().flatten().filter(|c| seen.insert(body_key(&c.test.decl))).collect()
}

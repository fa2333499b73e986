//! Mutant enumeration, mutation analysis and the derived metrics.
//!
//! Mutants are identified eagerly and materialized on demand. An identity is
//! `file:line:col:Operator:ordinal`, where the ordinal separates mutants of
//! the same operator that share a start position (`a + b + c`).

mod analysis;
mod metrics;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::program::Program;
use crate::syntax::visit::{walk_expr_mut, walk_stmt_mut, VisitMut};
use crate::syntax::*;

pub use analysis::{BaselineRedError, MutantResult, MutationAnalyzer, MutationReport};
pub use metrics::{increase_killed, increase_killed_counts, mutation_score, UndefinedIncrease};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Operator {
    ConditionalsBoundary,
    Increments,
    InvertNegatives,
    Math,
    NegateConditionals,
    ReturnValues,
    VoidMethodCalls,
}

impl Operator {
    pub const ALL: [Operator; 7] = [
        Operator::ConditionalsBoundary,
        Operator::Increments,
        Operator::InvertNegatives,
        Operator::Math,
        Operator::NegateConditionals,
        Operator::ReturnValues,
        Operator::VoidMethodCalls,
    ];
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Appended to string return values by [`Operator::ReturnValues`].
pub const STRING_MARKER: &str = "*";

#[derive(Clone, Debug, PartialEq)]
enum Rewrite {
    /// New kind for the expression node; its meta is kept.
    Expr(ExprKind),
    /// Statements that take the place of the statement node.
    Stmt(Vec<Stmt>),
}

/// One operator applied at one location of application code.
#[derive(Clone, Debug, PartialEq)]
pub struct Mutant {
    pub id: String,
    pub pos: SourcePos,
    pub operator: Operator,
    pub ordinal: u32,
    /// Node rewritten by the mutant.
    pub node: NodeId,
    /// Innermost statement containing `node`; coverage of this statement
    /// decides whether the mutant counts as executed.
    pub statement: NodeId,
    pub class: Option<String>,
    /// `init` for constructors.
    pub method: String,
    pub description: String,
    rewrite: Rewrite,
}

impl Mutant {
    /// `Class.method`, or the bare name for free functions.
    pub fn method_path(&self) -> String {
        match &self.class {
            Some(class) => format!("{class}.{}", self.method),
            None => self.method.clone(),
        }
    }

    pub fn apply(&self, module: &Module) -> Module {
        let mut module = module.clone();
        let mut applier = Apply { mutant: self, done: false };
        for class in &mut module.classes {
            for m in class.ctor.iter_mut().chain(class.methods.iter_mut()) {
                applier.visit_block_mut(&mut m.body);
            }
        }
        for f in &mut module.functions {
            applier.visit_block_mut(&mut f.body);
        }
        debug_assert!(applier.done, "mutant {} found no target", self.id);
        module
    }

    /// The mutated program. Rewrites are type-preserving, so the original
    /// type table is reused.
    pub fn program(&self, original: &Program) -> Program {
        original.replaced(self.apply(original.module()))
    }
}

struct Apply<'m> {
    mutant: &'m Mutant,
    done: bool,
}

impl VisitMut for Apply<'_> {
    fn visit_block_mut(&mut self, block: &mut Vec<Stmt>) {
        if let Rewrite::Stmt(replacement) = &self.mutant.rewrite {
            if let Some(i) = block.iter().position(|s| s.meta.id == self.mutant.node) {
                block.splice(i..=i, replacement.iter().cloned());
                self.done = true;
                return;
            }
        }
        for stmt in block {
            self.visit_stmt_mut(stmt);
        }
    }

    fn visit_stmt_mut(&mut self, stmt: &mut Stmt) {
        if !self.done {
            walk_stmt_mut(self, stmt);
        }
    }

    fn visit_expr_mut(&mut self, expr: &mut Expr) {
        if self.done {
            return;
        }
        if expr.meta.id == self.mutant.node {
            if let Rewrite::Expr(kind) = &self.mutant.rewrite {
                expr.kind = kind.clone();
                self.done = true;
                return;
            }
        }
        walk_expr_mut(self, expr);
    }
}

/// Every mutant of the application code, ordered by file, byte offset,
/// operator and ordinal.
pub fn enumerate_mutants(program: &Program) -> Vec<Mutant> {
    let mut e = Enumerator { types: program.types(), out: Vec::new(), class: None, method: None, statement: NodeId(0) };
    for (class, method) in program.module().methods() {
        e.class = class.map(|c| c.name.as_str());
        e.method = Some(method);
        for stmt in &method.body {
            e.stmt(stmt);
        }
    }
    let mut raw = e.out;
    raw.sort_by(|a, b| {
        (&*a.pos.file, a.pos.byte_offset, a.operator).cmp(&(&*b.pos.file, b.pos.byte_offset, b.operator))
    });
    let mut mutants = Vec::with_capacity(raw.len());
    let mut ordinal = 0;
    for (i, r) in raw.into_iter().enumerate() {
        let same_slot = mutants.last().is_some_and(|prev: &Mutant| {
            prev.pos.file == r.pos.file && prev.pos.byte_offset == r.pos.byte_offset && prev.operator == r.operator
        });
        ordinal = if i > 0 && same_slot { ordinal + 1 } else { 0 };
        mutants.push(Mutant {
            id: format!("{}:{}:{}:{}:{ordinal}", r.pos.file, r.pos.line, r.pos.col, r.operator),
            pos: r.pos,
            operator: r.operator,
            ordinal,
            node: r.node,
            statement: r.statement,
            class: r.class,
            method: r.method,
            description: r.description,
            rewrite: r.rewrite,
        });
    }
    mutants
}

struct Raw {
    pos: SourcePos,
    operator: Operator,
    node: NodeId,
    statement: NodeId,
    class: Option<String>,
    method: String,
    description: String,
    rewrite: Rewrite,
}

struct Enumerator<'a> {
    types: &'a TypeTable,
    out: Vec<Raw>,
    class: Option<&'a str>,
    method: Option<&'a MethodDecl>,
    statement: NodeId,
}

fn synthetic_stmt(kind: StmtKind) -> Stmt {
    Stmt { meta: Meta::synthetic(), kind }
}

fn synthetic_expr(kind: ExprKind) -> Expr {
    Expr { meta: Meta::synthetic(), kind }
}

impl<'a> Enumerator<'a> {
    fn push(&mut self, meta: &Meta, operator: Operator, description: String, rewrite: Rewrite) {
        let method = self.method.expect("inside a method");
        self.out.push(Raw {
            pos: meta.pos.clone(),
            operator,
            node: meta.id,
            statement: self.statement,
            class: self.class.map(str::to_string),
            method: method.name.clone(),
            description,
            rewrite,
        });
    }

    fn block(&mut self, stmts: &'a [Stmt]) {
        let saved = self.statement;
        for s in stmts {
            self.stmt(s);
        }
        self.statement = saved;
    }

    fn stmt(&mut self, s: &'a Stmt) {
        self.statement = s.meta.id;
        match &s.kind {
            StmtKind::VarDecl { init, .. } => self.expr(init),
            StmtKind::Assign { target, value } => {
                self.expr(target);
                self.expr(value);
            }
            StmtKind::CompoundAssign { target, op, value } => {
                let flipped = match op {
                    CompoundOp::Add => CompoundOp::Sub,
                    CompoundOp::Sub => CompoundOp::Add,
                };
                let mut replacement = s.clone();
                replacement.kind = StmtKind::CompoundAssign { target: target.clone(), op: flipped, value: value.clone() };
                let description = format!("replaced `{}` with `{}`", op.symbol(), flipped.symbol());
                self.push(&s.meta, Operator::Increments, description, Rewrite::Stmt(vec![replacement]));
                self.expr(target);
                self.expr(value);
            }
            StmtKind::If { cond, then_block, else_block } => {
                self.expr(cond);
                self.block(then_block);
                if let Some(else_block) = else_block {
                    self.block(else_block);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.block(body);
            }
            StmtKind::Return(Some(value)) => {
                self.return_value(s, value);
                self.statement = s.meta.id;
                self.expr(value);
            }
            StmtKind::Return(None) => {}
            StmtKind::Throw(e) => self.expr(e),
            StmtKind::AssertThrows { body, .. } => self.block(body),
            StmtKind::Expr(e) => {
                if matches!(e.kind, ExprKind::Call { .. }) && *self.types.expr(e) == StaticType::Void {
                    let ExprKind::Call { name, .. } = &e.kind else { unreachable!() };
                    self.push(&s.meta, Operator::VoidMethodCalls, format!("removed call to `{name}`"), Rewrite::Stmt(vec![]));
                }
                self.expr(e);
            }
        }
    }

    fn return_value(&mut self, s: &Stmt, value: &Expr) {
        let Some(ty) = self.method.and_then(|m| m.return_type.as_ref()) else { return };
        let ret = |e: Expr| synthetic_stmt(StmtKind::Return(Some(e)));
        let (description, replacement) = match ty {
            Type::Int => {
                let cond = synthetic_expr(ExprKind::Binary {
                    op: BinaryOp::Eq,
                    lhs: Box::new(value.clone()),
                    rhs: Box::new(synthetic_expr(ExprKind::Int(0))),
                });
                let branch = StmtKind::If {
                    cond,
                    then_block: vec![ret(synthetic_expr(ExprKind::Int(1)))],
                    else_block: Some(vec![ret(synthetic_expr(ExprKind::Int(0)))]),
                };
                ("replaced int return with 1 if zero else 0".to_string(), Stmt { meta: s.meta.clone(), kind: branch })
            }
            Type::Bool => {
                let negated = synthetic_expr(ExprKind::Unary { op: UnaryOp::Not, operand: Box::new(value.clone()) });
                ("negated boolean return".to_string(), Stmt { meta: s.meta.clone(), kind: StmtKind::Return(Some(negated)) })
            }
            Type::Str => {
                let new_value = match &value.kind {
                    ExprKind::Str(text) if !text.is_empty() => synthetic_expr(ExprKind::Str(String::new())),
                    _ => synthetic_expr(ExprKind::Binary {
                        op: BinaryOp::Add,
                        lhs: Box::new(value.clone()),
                        rhs: Box::new(synthetic_expr(ExprKind::Str(STRING_MARKER.into()))),
                    }),
                };
                let description = format!("replaced string return with `{}`", expr_text(&new_value));
                (description, Stmt { meta: s.meta.clone(), kind: StmtKind::Return(Some(new_value)) })
            }
            Type::List | Type::Class(_) => {
                if matches!(value.kind, ExprKind::Null) {
                    return;
                }
                let null = synthetic_expr(ExprKind::Null);
                ("replaced return value with null".to_string(), Stmt { meta: s.meta.clone(), kind: StmtKind::Return(Some(null)) })
            }
        };
        self.push(&s.meta, Operator::ReturnValues, description, Rewrite::Stmt(vec![replacement]));
    }

    fn expr(&mut self, e: &'a Expr) {
        match &e.kind {
            ExprKind::Binary { op, lhs, rhs } => {
                let int_operands = *self.types.expr(e) == StaticType::Int;
                let boundary = match op {
                    BinaryOp::Lt => Some(BinaryOp::Le),
                    BinaryOp::Le => Some(BinaryOp::Lt),
                    BinaryOp::Gt => Some(BinaryOp::Ge),
                    BinaryOp::Ge => Some(BinaryOp::Gt),
                    _ => None,
                };
                let math = match op {
                    BinaryOp::Add if int_operands => Some(BinaryOp::Sub),
                    BinaryOp::Sub => Some(BinaryOp::Add),
                    BinaryOp::Mul => Some(BinaryOp::Div),
                    BinaryOp::Div => Some(BinaryOp::Mul),
                    BinaryOp::Rem => Some(BinaryOp::Mul),
                    _ => None,
                };
                let negated = match op {
                    BinaryOp::Eq => Some(BinaryOp::Ne),
                    BinaryOp::Ne => Some(BinaryOp::Eq),
                    BinaryOp::Lt => Some(BinaryOp::Ge),
                    BinaryOp::Le => Some(BinaryOp::Gt),
                    BinaryOp::Gt => Some(BinaryOp::Le),
                    BinaryOp::Ge => Some(BinaryOp::Lt),
                    _ => None,
                };
                for (operator, to) in [
                    (Operator::ConditionalsBoundary, boundary),
                    (Operator::Math, math),
                    (Operator::NegateConditionals, negated),
                ] {
                    if let Some(to) = to {
                        let kind = ExprKind::Binary { op: to, lhs: lhs.clone(), rhs: rhs.clone() };
                        let description = format!("replaced `{}` with `{}`", op.symbol(), to.symbol());
                        self.push(&e.meta, operator, description, Rewrite::Expr(kind));
                    }
                }
                self.expr(lhs);
                self.expr(rhs);
            }
            ExprKind::Unary { op: UnaryOp::Neg, operand } => {
                if matches!(operand.kind, ExprKind::Var(_) | ExprKind::Field { .. }) {
                    let description = format!("removed negation of `{}`", expr_text(operand));
                    self.push(&e.meta, Operator::InvertNegatives, description, Rewrite::Expr(operand.kind.clone()));
                }
                self.expr(operand);
            }
            ExprKind::Unary { operand, .. } => self.expr(operand),
            ExprKind::Call { receiver, args, .. } => {
                if let Some(receiver) = receiver {
                    self.expr(receiver);
                }
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::New { args, .. } => {
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::Field { receiver, .. } => self.expr(receiver),
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Null | ExprKind::Var(_) => {}
        }
    }
}

/// Row of the `mutate` JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantInfo {
    pub id: String,
    pub file: String,
    pub line: u32,
    pub operator: Operator,
    pub method: String,
}

impl From<&Mutant> for MutantInfo {
    fn from(m: &Mutant) -> Self {
        MutantInfo {
            id: m.id.clone(),
            file: m.pos.file.to_string(),
            line: m.pos.line,
            operator: m.operator,
            method: m.method_path(),
        }
    }
}

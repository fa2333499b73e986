//! Pre-order traversal helpers and node renumbering.

use super::ast::*;

/// Read-only pre-order visitor. Override a hook and call the matching
/// `walk_*` function to keep descending.
pub trait Visit<'a> {
    fn visit_stmt(&mut self, stmt: &'a Stmt) {
        walk_stmt(self, stmt);
    }

    fn visit_expr(&mut self, expr: &'a Expr) {
        walk_expr(self, expr);
    }
}

pub fn walk_block<'a, V: Visit<'a> + ?Sized>(v: &mut V, block: &'a [Stmt]) {
    for stmt in block {
        v.visit_stmt(stmt);
    }
}

pub fn walk_stmt<'a, V: Visit<'a> + ?Sized>(v: &mut V, stmt: &'a Stmt) {
    match &stmt.kind {
        StmtKind::VarDecl { init, .. } => v.visit_expr(init),
        StmtKind::Assign { target, value } | StmtKind::CompoundAssign { target, value, .. } => {
            v.visit_expr(target);
            v.visit_expr(value);
        }
        StmtKind::If { cond, then_block, else_block } => {
            v.visit_expr(cond);
            walk_block(v, then_block);
            if let Some(else_block) = else_block {
                walk_block(v, else_block);
            }
        }
        StmtKind::While { cond, body } => {
            v.visit_expr(cond);
            walk_block(v, body);
        }
        StmtKind::Return(value) => {
            if let Some(value) = value {
                v.visit_expr(value);
            }
        }
        StmtKind::Throw(e) | StmtKind::Expr(e) => v.visit_expr(e),
        StmtKind::AssertThrows { body, .. } => walk_block(v, body),
    }
}

pub fn walk_expr<'a, V: Visit<'a> + ?Sized>(v: &mut V, expr: &'a Expr) {
    match &expr.kind {
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Null | ExprKind::Var(_) => {}
        ExprKind::Unary { operand, .. } => v.visit_expr(operand),
        ExprKind::Binary { lhs, rhs, .. } => {
            v.visit_expr(lhs);
            v.visit_expr(rhs);
        }
        ExprKind::Call { receiver, args, .. } => {
            if let Some(receiver) = receiver {
                v.visit_expr(receiver);
            }
            for arg in args {
                v.visit_expr(arg);
            }
        }
        ExprKind::New { args, .. } => {
            for arg in args {
                v.visit_expr(arg);
            }
        }
        ExprKind::Field { receiver, .. } => v.visit_expr(receiver),
    }
}

/// Mutable pre-order visitor.
pub trait VisitMut {
    fn visit_stmt_mut(&mut self, stmt: &mut Stmt) {
        walk_stmt_mut(self, stmt);
    }

    fn visit_expr_mut(&mut self, expr: &mut Expr) {
        walk_expr_mut(self, expr);
    }

    fn visit_block_mut(&mut self, block: &mut Vec<Stmt>) {
        for stmt in block {
            self.visit_stmt_mut(stmt);
        }
    }
}

pub fn walk_stmt_mut<V: VisitMut + ?Sized>(v: &mut V, stmt: &mut Stmt) {
    match &mut stmt.kind {
        StmtKind::VarDecl { init, .. } => v.visit_expr_mut(init),
        StmtKind::Assign { target, value } | StmtKind::CompoundAssign { target, value, .. } => {
            v.visit_expr_mut(target);
            v.visit_expr_mut(value);
        }
        StmtKind::If { cond, then_block, else_block } => {
            v.visit_expr_mut(cond);
            v.visit_block_mut(then_block);
            if let Some(else_block) = else_block {
                v.visit_block_mut(else_block);
            }
        }
        StmtKind::While { cond, body } => {
            v.visit_expr_mut(cond);
            v.visit_block_mut(body);
        }
        StmtKind::Return(value) => {
            if let Some(value) = value {
                v.visit_expr_mut(value);
            }
        }
        StmtKind::Throw(e) | StmtKind::Expr(e) => v.visit_expr_mut(e),
        StmtKind::AssertThrows { body, .. } => v.visit_block_mut(body),
    }
}

pub fn walk_expr_mut<V: VisitMut + ?Sized>(v: &mut V, expr: &mut Expr) {
    match &mut expr.kind {
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Null | ExprKind::Var(_) => {}
        ExprKind::Unary { operand, .. } => v.visit_expr_mut(operand),
        ExprKind::Binary { lhs, rhs, .. } => {
            v.visit_expr_mut(lhs);
            v.visit_expr_mut(rhs);
        }
        ExprKind::Call { receiver, args, .. } => {
            if let Some(receiver) = receiver {
                v.visit_expr_mut(receiver);
            }
            for arg in args {
                v.visit_expr_mut(arg);
            }
        }
        ExprKind::New { args, .. } => {
            for arg in args {
                v.visit_expr_mut(arg);
            }
        }
        ExprKind::Field { receiver, .. } => v.visit_expr_mut(receiver),
    }
}

struct Renumber {
    next: u32,
}

impl Renumber {
    fn fresh(&mut self) -> NodeId {
        let id = NodeId(self.next);
        self.next += 1;
        id
    }

    fn method(&mut self, m: &mut MethodDecl) {
        m.meta.id = self.fresh();
        self.visit_block_mut(&mut m.body);
    }
}

impl VisitMut for Renumber {
    fn visit_stmt_mut(&mut self, stmt: &mut Stmt) {
        stmt.meta.id = self.fresh();
        walk_stmt_mut(self, stmt);
    }

    fn visit_expr_mut(&mut self, expr: &mut Expr) {
        expr.meta.id = self.fresh();
        walk_expr_mut(self, expr);
    }
}

impl Module {
    /// Reassigns every [`NodeId`] in pre-order, starting at 0.
    pub fn renumber(&mut self) {
        let mut r = Renumber { next: 0 };
        for class in &mut self.classes {
            class.meta.id = r.fresh();
            for field in &mut class.fields {
                field.meta.id = r.fresh();
            }
            if let Some(ctor) = &mut class.ctor {
                r.method(ctor);
            }
            for m in &mut class.methods {
                r.method(m);
            }
        }
        for f in &mut self.functions {
            r.method(f);
        }
    }

    /// All method bodies in traversal order with their owning class.
    pub fn methods(&self) -> impl Iterator<Item = (Option<&ClassDecl>, &MethodDecl)> {
        self.classes
            .iter()
            .flat_map(|c| c.ctor.iter().chain(c.methods.iter()).map(move |m| (Some(c), m)))
            .chain(self.functions.iter().map(|f| (None, f)))
    }
}

impl MethodDecl {
    /// Reassigns ids of this declaration and its body, starting at 0.
    pub fn renumber(&mut self) {
        Renumber { next: 0 }.method(self);
    }
}

/// Collects every statement id in pre-order.
pub fn statement_ids(block: &[Stmt]) -> Vec<NodeId> {
    struct Ids(Vec<NodeId>);
    impl<'a> Visit<'a> for Ids {
        fn visit_stmt(&mut self, stmt: &'a Stmt) {
            self.0.push(stmt.meta.id);
            walk_stmt(self, stmt);
        }
    }
    let mut ids = Ids(Vec::new());
    walk_block(&mut ids, block);
    ids.0
}

use crate::syntax::visit::{walk_expr_mut, walk_stmt_mut, VisitMut};
use crate::syntax::*;

/// A single structural change to a test body. Targets are node ids of the
/// test the edit is applied to; the result is renumbered.
#[derive(Clone, Debug, PartialEq)]
pub enum Edit {
    ReplaceExpr { target: NodeId, with: Expr },
    Duplicate { target: NodeId },
    Remove { target: NodeId },
    InsertAfter { anchor: NodeId, stmt: Stmt },
}

impl Edit {
    pub fn target(&self) -> NodeId {
        match self {
            Edit::ReplaceExpr { target, .. } | Edit::Duplicate { target } | Edit::Remove { target } => *target,
            Edit::InsertAfter { anchor, .. } => *anchor,
        }
    }

    /// Applies the edit. Returns `None` when the target does not exist.
    pub fn apply(&self, decl: &MethodDecl) -> Option<MethodDecl> {
        let mut out = decl.clone();
        let mut applier = Applier { edit: self, done: false };
        applier.visit_block_mut(&mut out.body);
        if !applier.done {
            return None;
        }
        out.renumber();
        Some(out)
    }
}

struct Applier<'e> {
    edit: &'e Edit,
    done: bool,
}

impl VisitMut for Applier<'_> {
    fn visit_block_mut(&mut self, block: &mut Vec<Stmt>) {
        if self.done {
            return;
        }
        let target = self.edit.target();
        if let Some(i) = block.iter().position(|s| s.meta.id == target) {
            match self.edit {
                Edit::Duplicate { .. } => {
                    let copy = block[i].clone();
                    block.insert(i + 1, copy);
                    self.done = true;
                    return;
                }
                Edit::Remove { .. } => {
                    block.remove(i);
                    self.done = true;
                    return;
                }
                Edit::InsertAfter { stmt, .. } => {
                    block.insert(i + 1, stmt.clone());
                    self.done = true;
                    return;
                }
                Edit::ReplaceExpr { .. } => {}
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
        if let Edit::ReplaceExpr { target, with } = self.edit {
            if expr.meta.id == *target {
                *expr = with.clone();
                self.done = true;
                return;
            }
        }
        walk_expr_mut(self, expr);
    }
}

/// Removes assertion statements and `observe()` markers; `assert_throws`
/// blocks are replaced by their bodies. The result is renumbered.
pub fn strip_assertions(decl: &MethodDecl) -> MethodDecl {
    fn strip(block: &mut Vec<Stmt>) {
        let old = std::mem::take(block);
        for mut stmt in old {
            match stmt.kind {
                StmtKind::AssertThrows { body, .. } => {
                    let mut body = body;
                    strip(&mut body);
                    block.extend(body);
                    continue;
                }
                StmtKind::Expr(ref e) if e.is_assertion_call() || is_observe(e) => continue,
                StmtKind::If { ref mut then_block, ref mut else_block, .. } => {
                    strip(then_block);
                    if let Some(else_block) = else_block {
                        strip(else_block);
                    }
                }
                StmtKind::While { ref mut body, .. } => strip(body),
                _ => {}
            }
            block.push(stmt);
        }
    }
    let mut out = decl.clone();
    strip(&mut out.body);
    out.renumber();
    out
}

pub(crate) fn is_observe(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::Call { receiver: None, name, .. } if name == OBSERVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decl(src: &str) -> MethodDecl {
        parse_module(src, "t.mini").unwrap().functions.remove(0)
    }

    #[test]
    fn strip_unwraps_expected_exceptions() {
        let d = decl("fn test_t() { let a = 1; assert_eq(1, a); assert_throws(\"x\") { f(); } observe(); }");
        let s = strip_assertions(&d);
        assert_eq!(pretty_print(&s), "fn test_t() {\n  let a = 1;\n  f();\n}\n");
    }

    #[test]
    fn edits_renumber() {
        let d = decl("fn test_t() { f(); g(); }");
        let target = d.body[0].meta.id;
        let dup = Edit::Duplicate { target }.apply(&d).unwrap();
        assert_eq!(pretty_print(&dup), "fn test_t() {\n  f();\n  f();\n  g();\n}\n");
        let ids: Vec<NodeId> = dup.body.iter().map(|s| s.meta.id).collect();
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
        assert!(Edit::Remove { target: NodeId(999) }.apply(&d).is_none());
    }
}

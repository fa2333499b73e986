//! Canonical formatting: two-space indent, one statement per line, single
//! spaces around binary operators, minimal parentheses.

use std::fmt::Write;

use super::ast::*;

/// Anything that can be rendered as canonical MiniLang text.
pub trait Pretty {
    fn pretty(&self, out: &mut Printer);
}

pub fn pretty_print<T: Pretty + ?Sized>(node: &T) -> String {
    let mut printer = Printer::default();
    node.pretty(&mut printer);
    printer.buf
}

#[derive(Default)]
pub struct Printer {
    buf: String,
    indent: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.buf.push_str("  ");
        }
        self.buf.push_str(text);
        self.buf.push('\n');
    }

    fn block(&mut self, header: &str, body: &[Stmt]) {
        self.line(&format!("{header} {{"));
        self.indent += 1;
        for stmt in body {
            stmt.pretty(self);
        }
        self.indent -= 1;
    }
}

impl Pretty for Module {
    fn pretty(&self, out: &mut Printer) {
        let mut first = true;
        for class in &self.classes {
            if !first {
                out.buf.push('\n');
            }
            first = false;
            class.pretty(out);
        }
        for f in &self.functions {
            if !first {
                out.buf.push('\n');
            }
            first = false;
            f.pretty(out);
        }
    }
}

impl Pretty for ClassDecl {
    fn pretty(&self, out: &mut Printer) {
        out.line(&format!("class {} {{", self.name));
        out.indent += 1;
        for field in &self.fields {
            out.line(&format!("var {}: {};", field.name, field.ty));
        }
        let mut need_gap = !self.fields.is_empty();
        for m in self.ctor.iter().chain(&self.methods) {
            if need_gap {
                out.buf.push('\n');
            }
            need_gap = true;
            m.pretty(out);
        }
        out.indent -= 1;
        out.line("}");
    }
}

impl Pretty for MethodDecl {
    fn pretty(&self, out: &mut Printer) {
        out.block(&signature(self), &self.body);
        out.line("}");
    }
}

/// Header line of a method without the opening brace.
pub fn signature(m: &MethodDecl) -> String {
    let params: Vec<String> = m.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
    let params = params.join(", ");
    if m.name == "init" && m.return_type.is_none() && m.is_pub {
        return format!("init({params})");
    }
    let mut s = String::new();
    if m.is_pub {
        s.push_str("pub ");
    }
    let _ = write!(s, "fn {}({params})", m.name);
    if let Some(ty) = &m.return_type {
        let _ = write!(s, " -> {ty}");
    }
    s
}

impl Pretty for Stmt {
    fn pretty(&self, out: &mut Printer) {
        match &self.kind {
            StmtKind::VarDecl { name, ty, init } => match ty {
                Some(ty) => out.line(&format!("let {name}: {ty} = {};", expr_text(init))),
                None => out.line(&format!("let {name} = {};", expr_text(init))),
            },
            StmtKind::Assign { target, value } => {
                out.line(&format!("{} = {};", expr_text(target), expr_text(value)));
            }
            StmtKind::CompoundAssign { target, op, value } => {
                out.line(&format!("{} {} {};", expr_text(target), op.symbol(), expr_text(value)));
            }
            StmtKind::If { .. } => {
                print_if(self, out, "");
                out.line("}");
            }
            StmtKind::While { cond, body } => {
                out.block(&format!("while ({})", expr_text(cond)), body);
                out.line("}");
            }
            StmtKind::Return(None) => out.line("return;"),
            StmtKind::Return(Some(e)) => out.line(&format!("return {};", expr_text(e))),
            StmtKind::Throw(e) => out.line(&format!("throw {};", expr_text(e))),
            StmtKind::AssertThrows { message, body } => {
                out.block(&format!("{ASSERT_THROWS}({})", quote(message)), body);
                out.line("}");
            }
            StmtKind::Expr(e) => out.line(&format!("{};", expr_text(e))),
        }
    }
}

/// Prints an `if` chain up to, but excluding, the final closing brace.
fn print_if(stmt: &Stmt, out: &mut Printer, prefix: &str) {
    let StmtKind::If { cond, then_block, else_block } = &stmt.kind else { unreachable!() };
    out.block(&format!("{prefix}if ({})", expr_text(cond)), then_block);
    match else_block.as_deref() {
        None => {}
        Some([nested]) if matches!(nested.kind, StmtKind::If { .. }) => print_if(nested, out, "} else "),
        Some(else_block) => out.block("} else", else_block),
    }
}

impl Pretty for Expr {
    fn pretty(&self, out: &mut Printer) {
        out.buf.push_str(&expr_text(self));
    }
}

const POSTFIX_PREC: u8 = 8;
const UNARY_PREC: u8 = 7;

fn expr_prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { .. } => UNARY_PREC,
        _ => POSTFIX_PREC,
    }
}

pub fn expr_text(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn write_expr(s: &mut String, e: &Expr, min_prec: u8) {
    if expr_prec(e) < min_prec {
        s.push('(');
        write_expr(s, e, 0);
        s.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Int(v) => {
            let _ = write!(s, "{v}");
        }
        ExprKind::Bool(b) => {
            let _ = write!(s, "{b}");
        }
        ExprKind::Str(text) => s.push_str(&quote(text)),
        ExprKind::Null => s.push_str("null"),
        ExprKind::Var(name) => s.push_str(name),
        ExprKind::Unary { op, operand } => {
            s.push(match op {
                UnaryOp::Neg => '-',
                UnaryOp::Not => '!',
            });
            let mut inner = String::new();
            write_expr(&mut inner, operand, UNARY_PREC);
            // `-5` would re-lex as a literal and `--x` reads poorly.
            if inner.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '!') {
                s.push('(');
                s.push_str(&inner);
                s.push(')');
            } else {
                s.push_str(&inner);
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            write_expr(s, lhs, p);
            let _ = write!(s, " {} ", op.symbol());
            write_expr(s, rhs, p + 1);
        }
        ExprKind::Call { receiver, name, args } => {
            if let Some(receiver) = receiver {
                write_expr(s, receiver, POSTFIX_PREC);
                s.push('.');
            }
            s.push_str(name);
            write_args(s, args);
        }
        ExprKind::New { class, args } => {
            let _ = write!(s, "new {class}");
            write_args(s, args);
        }
        ExprKind::Field { receiver, name } => {
            write_expr(s, receiver, POSTFIX_PREC);
            s.push('.');
            s.push_str(name);
        }
    }
}

fn write_args(s: &mut String, args: &[Expr]) {
    s.push('(');
    for (i, arg) in args.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write_expr(s, arg, 0);
    }
    s.push(')');
}

/// Quotes a string as a MiniLang literal.
pub fn quote(text: &str) -> String {
    let mut s = String::with_capacity(text.len() + 2);
    s.push('"');
    for c in text.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            '\t' => s.push_str("\\t"),
            '\r' => s.push_str("\\r"),
            '\0' => s.push_str("\\0"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_module};

    #[test]
    fn int_literal() {
        assert_eq!(expr_text(&Expr::int(0)), "0");
        assert_eq!(expr_text(&Expr::int(-7)), "-7");
    }

    #[test]
    fn minimal_parentheses() {
        for src in ["(a + b) * c", "a - (b - c)", "a - b - c", "!(a && b)", "-(5)", "-(-x)", "(a + b).size()", "x * -5"] {
            let printed = expr_text(&parse_expr(src).unwrap());
            assert_eq!(printed, src);
        }
        assert_eq!(expr_text(&parse_expr("((a))").unwrap()), "a");
    }

    #[test]
    fn canonical_layout() {
        let src = "class A{var n:int;init(){self.n=0;}pub fn size()->int{if(self.n>0){return 1;}else if(self.n<0){return 2;}else{return 0;}}}fn test_a(){let a=new A();assert_eq(0,a.size());}";
        let text = pretty_print(&parse_module(src, "a.mini").unwrap());
        let expected = "\
class A {
  var n: int;

  init() {
    self.n = 0;
  }

  pub fn size() -> int {
    if (self.n > 0) {
      return 1;
    } else if (self.n < 0) {
      return 2;
    } else {
      return 0;
    }
  }
}

fn test_a() {
  let a = new A();
  assert_eq(0, a.size());
}
";
        assert_eq!(text, expected);
    }

    #[test]
    fn string_escapes_survive() {
        let e = Expr::new(ExprKind::Str("a\"b\\c\n\0".into()));
        assert_eq!(parse_expr(&expr_text(&e)).unwrap(), e);
    }
}

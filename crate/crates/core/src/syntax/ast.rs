//! Abstract syntax tree for MiniLang.
//!
//! Every node carries a [`Meta`] with its [`NodeId`] and [`SourcePos`].
//! `Meta` compares equal to every other `Meta`, so the derived `PartialEq`
//! on AST types is *structural*: two trees are equal when they differ only
//! in positions and ids.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Identity of a node inside one module, assigned in pre-order traversal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SourcePos {
    pub file: Arc<str>,
    /// 1-based.
    pub line: u32,
    /// 1-based, counted in chars.
    pub col: u32,
    pub byte_offset: usize,
}

impl SourcePos {
    pub fn new(file: Arc<str>, line: u32, col: u32, byte_offset: usize) -> Self {
        Self { file, line, col, byte_offset }
    }

    /// Position used for nodes synthesized by transformations.
    pub fn synthetic() -> Self {
        Self { file: Arc::from("<synthetic>"), line: 1, col: 1, byte_offset: 0 }
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

/// Node bookkeeping that is ignored by structural equality.
#[derive(Clone, Debug)]
pub struct Meta {
    pub id: NodeId,
    pub pos: SourcePos,
    /// Byte offset one past the last token of the node.
    pub end: usize,
}

impl Meta {
    pub fn new(pos: SourcePos) -> Self {
        let end = pos.byte_offset;
        Self { id: NodeId::default(), pos, end }
    }

    pub fn synthetic() -> Self {
        Self::new(SourcePos::synthetic())
    }
}

impl PartialEq for Meta {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Type {
    Int,
    Bool,
    Str,
    List,
    Class(String),
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::Str => f.write_str("str"),
            Type::List => f.write_str("List"),
            Type::Class(name) => f.write_str(name),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Module {
    pub classes: Vec<ClassDecl>,
    pub functions: Vec<MethodDecl>,
}

impl Module {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&MethodDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    /// Concatenates modules in order and renumbers the result.
    pub fn merge(modules: impl IntoIterator<Item = Module>) -> Module {
        let mut merged = Module::default();
        for m in modules {
            merged.classes.extend(m.classes);
            merged.functions.extend(m.functions);
        }
        merged.renumber();
        merged
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassDecl {
    pub meta: Meta,
    pub name: String,
    pub fields: Vec<FieldDecl>,
    pub ctor: Option<MethodDecl>,
    pub methods: Vec<MethodDecl>,
}

impl ClassDecl {
    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// Public getter methods of this class sorted by name.
    pub fn getters(&self) -> Vec<&MethodDecl> {
        let mut getters: Vec<_> = self.methods.iter().filter(|m| m.is_pub && is_getter(m)).collect();
        getters.sort_by(|a, b| a.name.cmp(&b.name));
        getters
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDecl {
    pub meta: Meta,
    pub name: String,
    pub ty: Type,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
}

/// A method, constructor or free function.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodDecl {
    pub meta: Meta,
    pub name: String,
    pub params: Vec<Param>,
    /// `None` for void.
    pub return_type: Option<Type>,
    pub body: Vec<Stmt>,
    pub is_pub: bool,
}

impl MethodDecl {
    pub fn is_void(&self) -> bool {
        self.return_type.is_none()
    }
}

const GETTER_PREFIXES: [&str; 7] = ["get", "is", "has", "size", "length", "count", "to_"];

/// Whether a method can be used to observe object state.
///
/// A getter takes no parameters, returns a value, and its name is one of the
/// prefixes `get`, `is`, `has`, `size`, `length`, `count`, `to_` either on its
/// own or followed by `_` or an uppercase letter (`is_empty`, `getX`, `size`).
pub fn is_getter(method: &MethodDecl) -> bool {
    method.params.is_empty() && !method.is_void() && is_getter_name(&method.name)
}

pub fn is_getter_name(name: &str) -> bool {
    GETTER_PREFIXES.iter().any(|prefix| match name.strip_prefix(prefix) {
        Some("") => !prefix.ends_with('_'),
        Some(rest) => {
            prefix.ends_with('_') || rest.starts_with('_') || rest.starts_with(|c: char| c.is_ascii_uppercase())
        }
        None => false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub meta: Meta,
    pub kind: StmtKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompoundOp {
    Add,
    Sub,
}

impl CompoundOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompoundOp::Add => "+=",
            CompoundOp::Sub => "-=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    VarDecl { name: String, ty: Option<Type>, init: Expr },
    /// `target` is a variable or a field access.
    Assign { target: Expr, value: Expr },
    CompoundAssign { target: Expr, op: CompoundOp, value: Expr },
    If { cond: Expr, then_block: Vec<Stmt>, else_block: Option<Vec<Stmt>> },
    While { cond: Expr, body: Vec<Stmt> },
    Return(Option<Expr>),
    Throw(Expr),
    /// `assert_throws("message") { ... }`
    AssertThrows { message: String, body: Vec<Stmt> },
    Expr(Expr),
}

pub const ASSERT_EQ: &str = "assert_eq";
pub const ASSERT_TRUE: &str = "assert_true";
pub const ASSERT_FALSE: &str = "assert_false";
pub const ASSERT_THROWS: &str = "assert_throws";
/// Builtin marking an observation point in an instrumented test.
pub const OBSERVE: &str = "observe";

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Self { meta: Meta::synthetic(), kind }
    }

    /// Assertion statements are calls to `assert_eq`, `assert_true`,
    /// `assert_false`, and `assert_throws` blocks.
    pub fn is_assertion(&self) -> bool {
        match &self.kind {
            StmtKind::AssertThrows { .. } => true,
            StmtKind::Expr(e) => e.is_assertion_call(),
            _ => false,
        }
    }

    /// The call expression of an expression statement, if any.
    pub fn as_call(&self) -> Option<&Expr> {
        match &self.kind {
            StmtKind::Expr(e) if matches!(e.kind, ExprKind::Call { .. }) => Some(e),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 6,
        }
    }

    pub const ALL: [BinaryOp; 13] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Eq,
        BinaryOp::Ne,
        BinaryOp::And,
        BinaryOp::Or,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub meta: Meta,
    pub kind: ExprKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Str(String),
    Null,
    /// A local variable, parameter, or `self`.
    Var(String),
    Unary { op: UnaryOp, operand: Box<Expr> },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Call { receiver: Option<Box<Expr>>, name: String, args: Vec<Expr> },
    New { class: String, args: Vec<Expr> },
    Field { receiver: Box<Expr>, name: String },
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Self { meta: Meta::synthetic(), kind }
    }

    pub fn int(v: i64) -> Self {
        Self::new(ExprKind::Int(v))
    }

    pub fn var(name: &str) -> Self {
        Self::new(ExprKind::Var(name.to_string()))
    }

    pub fn call(receiver: Option<Expr>, name: &str, args: Vec<Expr>) -> Self {
        Self::new(ExprKind::Call { receiver: receiver.map(Box::new), name: name.to_string(), args })
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Self::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
    }

    pub fn is_literal(&self) -> bool {
        matches!(self.kind, ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Null)
    }

    pub fn is_assertion_call(&self) -> bool {
        matches!(&self.kind, ExprKind::Call { receiver: None, name, .. }
            if name == ASSERT_EQ || name == ASSERT_TRUE || name == ASSERT_FALSE)
    }

    /// Whether `name` occurs as a variable anywhere in this expression.
    pub fn mentions(&self, name: &str) -> bool {
        match &self.kind {
            ExprKind::Var(v) => v == name,
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Null => false,
            ExprKind::Unary { operand, .. } => operand.mentions(name),
            ExprKind::Binary { lhs, rhs, .. } => lhs.mentions(name) || rhs.mentions(name),
            ExprKind::Call { receiver, args, .. } => {
                receiver.as_ref().is_some_and(|r| r.mentions(name)) || args.iter().any(|a| a.mentions(name))
            }
            ExprKind::New { args, .. } => args.iter().any(|a| a.mentions(name)),
            ExprKind::Field { receiver, .. } => receiver.mentions(name),
        }
    }
}

impl Stmt {
    /// Whether `name` occurs as a variable anywhere in this statement.
    pub fn mentions(&self, name: &str) -> bool {
        let any = |stmts: &[Stmt]| stmts.iter().any(|s| s.mentions(name));
        match &self.kind {
            StmtKind::VarDecl { name: declared, init, .. } => declared == name || init.mentions(name),
            StmtKind::Assign { target, value } | StmtKind::CompoundAssign { target, value, .. } => {
                target.mentions(name) || value.mentions(name)
            }
            StmtKind::If { cond, then_block, else_block } => {
                cond.mentions(name) || any(then_block) || else_block.as_deref().is_some_and(any)
            }
            StmtKind::While { cond, body } => cond.mentions(name) || any(body),
            StmtKind::Return(e) => e.as_ref().is_some_and(|e| e.mentions(name)),
            StmtKind::Throw(e) | StmtKind::Expr(e) => e.mentions(name),
            StmtKind::AssertThrows { body, .. } => any(body),
        }
    }
}

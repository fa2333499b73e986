//! Static checks. Names, arities and visibility are resolved here, along
//! with a simple first-order type discipline.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::ast::*;
use super::CheckError;

/// Static type of an expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StaticType {
    Int,
    Bool,
    Str,
    List,
    Null,
    Object(String),
    Void,
    /// Unknown; produced by `List.get` and friends.
    Any,
}

impl StaticType {
    pub fn from_decl(ty: &Type) -> Self {
        match ty {
            Type::Int => StaticType::Int,
            Type::Bool => StaticType::Bool,
            Type::Str => StaticType::Str,
            Type::List => StaticType::List,
            Type::Class(c) => StaticType::Object(c.clone()),
        }
    }

    pub fn from_return(ty: Option<&Type>) -> Self {
        ty.map_or(StaticType::Void, Self::from_decl)
    }

    /// Whether a value of type `self` may be stored where `target` is expected.
    pub fn fits(&self, target: &StaticType) -> bool {
        use StaticType::*;
        match (self, target) {
            (Void, _) | (_, Void) => false,
            (Any, _) | (_, Any) => true,
            (Null, Str | List | Object(_) | Null) => true,
            (a, b) => a == b,
        }
    }

    pub fn is_reference(&self) -> bool {
        matches!(self, StaticType::List | StaticType::Object(_) | StaticType::Null | StaticType::Any)
    }
}

impl fmt::Display for StaticType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StaticType::Int => f.write_str("int"),
            StaticType::Bool => f.write_str("bool"),
            StaticType::Str => f.write_str("str"),
            StaticType::List => f.write_str("List"),
            StaticType::Null => f.write_str("null"),
            StaticType::Object(c) => f.write_str(c),
            StaticType::Void => f.write_str("void"),
            StaticType::Any => f.write_str("any"),
        }
    }
}

/// Types recorded during checking, keyed by node id.
#[derive(Clone, Debug, Default)]
pub struct TypeTable {
    /// Type of every expression node.
    pub exprs: HashMap<NodeId, StaticType>,
    /// Declared type of every `let` statement.
    pub locals: HashMap<NodeId, StaticType>,
}

impl TypeTable {
    pub fn expr(&self, e: &Expr) -> &StaticType {
        self.exprs.get(&e.meta.id).unwrap_or(&StaticType::Any)
    }
}

/// Builtin free functions available everywhere.
pub const BUILTINS: [&str; 2] = ["random", "len"];
/// Builtins only available inside test functions.
pub const TEST_BUILTINS: [&str; 4] = [ASSERT_EQ, ASSERT_TRUE, ASSERT_FALSE, OBSERVE];

/// Signature of a builtin `List` method: (name, param count, returns).
pub const LIST_METHODS: [(&str, usize, StaticType); 7] = [
    ("add", 1, StaticType::Void),
    ("set", 2, StaticType::Void),
    ("get", 1, StaticType::Any),
    ("remove", 1, StaticType::Any),
    ("contains", 1, StaticType::Bool),
    ("size", 0, StaticType::Int),
    ("is_empty", 0, StaticType::Bool),
];

const RESERVED_TYPES: [&str; 4] = ["int", "bool", "str", "List"];

/// Checks application code and returns its type table.
pub fn check_program(module: &Module) -> Result<TypeTable, CheckError> {
    let mut checker = Checker::new(module)?;
    for (class, method) in module.methods() {
        checker.method(class, method, false)?;
    }
    Ok(checker.table)
}

/// Checks a test function against application code.
pub fn check_test(program: &Module, test: &MethodDecl) -> Result<TypeTable, CheckError> {
    if !test.name.starts_with("test_") {
        return Err(CheckError::new(&test.meta.pos, format!("test function `{}` must start with `test_`", test.name)));
    }
    if !test.params.is_empty() || !test.is_void() {
        return Err(CheckError::new(&test.meta.pos, format!("test `{}` must take no parameters and return nothing", test.name)));
    }
    let mut checker = Checker::new(program)?;
    checker.method(None, test, true)?;
    Ok(checker.table)
}

struct Checker<'m> {
    module: &'m Module,
    table: TypeTable,
    scopes: Vec<Vec<(String, StaticType)>>,
    class: Option<&'m ClassDecl>,
    return_type: StaticType,
    in_test: bool,
}

impl<'m> Checker<'m> {
    fn new(module: &'m Module) -> Result<Self, CheckError> {
        let mut classes = HashSet::new();
        for class in &module.classes {
            if RESERVED_TYPES.contains(&class.name.as_str()) || !classes.insert(class.name.as_str()) {
                return Err(CheckError::new(&class.meta.pos, format!("invalid or duplicate class name `{}`", class.name)));
            }
            let mut members = HashSet::new();
            for field in &class.fields {
                if !members.insert(("field", field.name.as_str())) {
                    return Err(CheckError::new(&field.meta.pos, format!("duplicate field `{}`", field.name)));
                }
            }
            for m in &class.methods {
                if !members.insert(("method", m.name.as_str())) {
                    return Err(CheckError::new(&m.meta.pos, format!("duplicate method `{}`", m.name)));
                }
            }
        }
        let mut functions = HashSet::new();
        for f in &module.functions {
            let name = f.name.as_str();
            if BUILTINS.contains(&name) || TEST_BUILTINS.contains(&name) || !functions.insert(name) {
                return Err(CheckError::new(&f.meta.pos, format!("invalid or duplicate function name `{name}`")));
            }
        }
        let checker = Checker {
            module,
            table: TypeTable::default(),
            scopes: Vec::new(),
            class: None,
            return_type: StaticType::Void,
            in_test: false,
        };
        for class in &module.classes {
            for field in &class.fields {
                checker.known_type(&field.ty, &field.meta.pos)?;
            }
        }
        Ok(checker)
    }

    fn known_type(&self, ty: &Type, pos: &SourcePos) -> Result<(), CheckError> {
        match ty {
            Type::Class(c) if self.module.class(c).is_none() => Err(CheckError::new(pos, format!("unknown type `{c}`"))),
            _ => Ok(()),
        }
    }

    fn method(&mut self, class: Option<&'m ClassDecl>, m: &MethodDecl, in_test: bool) -> Result<(), CheckError> {
        self.class = class;
        self.in_test = in_test;
        self.return_type = StaticType::from_return(m.return_type.as_ref());
        if let Some(ty) = &m.return_type {
            self.known_type(ty, &m.meta.pos)?;
        }
        let mut params = Vec::new();
        for p in &m.params {
            self.known_type(&p.ty, &m.meta.pos)?;
            if params.iter().any(|(n, _)| n == &p.name) || p.name == "self" {
                return Err(CheckError::new(&m.meta.pos, format!("duplicate parameter `{}`", p.name)));
            }
            params.push((p.name.clone(), StaticType::from_decl(&p.ty)));
        }
        self.scopes = vec![params];
        self.block(&m.body)
    }

    fn lookup(&self, name: &str) -> Option<&StaticType> {
        self.scopes.iter().rev().find_map(|scope| scope.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t))
    }

    fn block(&mut self, stmts: &[Stmt]) -> Result<(), CheckError> {
        self.scopes.push(Vec::new());
        for stmt in stmts {
            self.stmt(stmt)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn expect(&self, actual: &StaticType, expected: &StaticType, pos: &SourcePos) -> Result<(), CheckError> {
        if actual.fits(expected) {
            Ok(())
        } else {
            Err(CheckError::new(pos, format!("type mismatch: expected {expected}, found {actual}")))
        }
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<(), CheckError> {
        let pos = &stmt.meta.pos;
        match &stmt.kind {
            StmtKind::VarDecl { name, ty, init } => {
                let init_ty = self.expr(init)?;
                if name == "self" {
                    return Err(CheckError::new(pos, "cannot declare `self`"));
                }
                if self.scopes.last().is_some_and(|s| s.iter().any(|(n, _)| n == name)) {
                    return Err(CheckError::new(pos, format!("`{name}` is already declared in this scope")));
                }
                let declared = match ty {
                    Some(ty) => {
                        self.known_type(ty, pos)?;
                        let declared = StaticType::from_decl(ty);
                        self.expect(&init_ty, &declared, pos)?;
                        declared
                    }
                    None if init_ty == StaticType::Void => {
                        return Err(CheckError::new(pos, "cannot bind the result of a void call"));
                    }
                    None => init_ty,
                };
                self.table.locals.insert(stmt.meta.id, declared.clone());
                if let Some(scope) = self.scopes.last_mut() {
                    scope.push((name.clone(), declared));
                }
            }
            StmtKind::Assign { target, value } => {
                if matches!(&target.kind, ExprKind::Var(v) if v == "self") {
                    return Err(CheckError::new(pos, "cannot assign to `self`"));
                }
                let target_ty = self.expr(target)?;
                let value_ty = self.expr(value)?;
                self.expect(&value_ty, &target_ty, pos)?;
            }
            StmtKind::CompoundAssign { target, value, .. } => {
                let target_ty = self.expr(target)?;
                self.expect(&target_ty, &StaticType::Int, pos)?;
                let value_ty = self.expr(value)?;
                self.expect(&value_ty, &StaticType::Int, pos)?;
            }
            StmtKind::If { cond, then_block, else_block } => {
                let cond_ty = self.expr(cond)?;
                self.expect(&cond_ty, &StaticType::Bool, pos)?;
                self.block(then_block)?;
                if let Some(else_block) = else_block {
                    self.block(else_block)?;
                }
            }
            StmtKind::While { cond, body } => {
                let cond_ty = self.expr(cond)?;
                self.expect(&cond_ty, &StaticType::Bool, pos)?;
                self.block(body)?;
            }
            StmtKind::Return(value) => match (value, &self.return_type) {
                (None, StaticType::Void) => {}
                (None, _) => return Err(CheckError::new(pos, "missing return value")),
                (Some(_), StaticType::Void) => return Err(CheckError::new(pos, "void function cannot return a value")),
                (Some(value), expected) => {
                    let expected = expected.clone();
                    let ty = self.expr(value)?;
                    self.expect(&ty, &expected, pos)?;
                }
            },
            StmtKind::Throw(e) => {
                let ty = self.expr(e)?;
                self.expect(&ty, &StaticType::Str, pos)?;
            }
            StmtKind::AssertThrows { body, .. } => {
                if !self.in_test {
                    return Err(CheckError::new(pos, "`assert_throws` is only allowed in tests"));
                }
                self.block(body)?;
            }
            StmtKind::Expr(e) => {
                if !matches!(e.kind, ExprKind::Call { .. } | ExprKind::New { .. }) {
                    return Err(CheckError::new(pos, "expression statement must be a call"));
                }
                self.expr(e)?;
            }
        }
        Ok(())
    }

    fn expr(&mut self, e: &Expr) -> Result<StaticType, CheckError> {
        let ty = self.expr_inner(e)?;
        self.table.exprs.insert(e.meta.id, ty.clone());
        Ok(ty)
    }

    fn args(&mut self, args: &[Expr], params: &[StaticType], what: &str, pos: &SourcePos) -> Result<(), CheckError> {
        if args.len() != params.len() {
            return Err(CheckError::new(pos, format!("`{what}` expects {} argument(s), got {}", params.len(), args.len())));
        }
        for (arg, param) in args.iter().zip(params) {
            let ty = self.expr(arg)?;
            self.expect(&ty, param, &arg.meta.pos)?;
        }
        Ok(())
    }

    fn expr_inner(&mut self, e: &Expr) -> Result<StaticType, CheckError> {
        use StaticType as T;
        let pos = &e.meta.pos;
        Ok(match &e.kind {
            ExprKind::Int(_) => T::Int,
            ExprKind::Bool(_) => T::Bool,
            ExprKind::Str(_) => T::Str,
            ExprKind::Null => T::Null,
            ExprKind::Var(name) if name == "self" => match self.class {
                Some(class) => T::Object(class.name.clone()),
                None => return Err(CheckError::new(pos, "`self` outside of a method")),
            },
            ExprKind::Var(name) => match self.lookup(name) {
                Some(ty) => ty.clone(),
                None => return Err(CheckError::new(pos, format!("undefined variable `{name}`"))),
            },
            ExprKind::Unary { op, operand } => {
                let ty = self.expr(operand)?;
                let expected = match op {
                    UnaryOp::Neg => T::Int,
                    UnaryOp::Not => T::Bool,
                };
                self.expect(&ty, &expected, pos)?;
                expected
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.expr(lhs)?;
                let r = self.expr(rhs)?;
                match op {
                    BinaryOp::Add if l == T::Str || r == T::Str => {
                        self.expect(&l, &T::Str, pos)?;
                        self.expect(&r, &T::Str, pos)?;
                        T::Str
                    }
                    BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => {
                        self.expect(&l, &T::Int, pos)?;
                        self.expect(&r, &T::Int, pos)?;
                        T::Int
                    }
                    BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                        self.expect(&l, &T::Int, pos)?;
                        self.expect(&r, &T::Int, pos)?;
                        T::Bool
                    }
                    BinaryOp::Eq | BinaryOp::Ne => {
                        if !(l.fits(&r) || r.fits(&l)) {
                            return Err(CheckError::new(pos, format!("cannot compare {l} with {r}")));
                        }
                        T::Bool
                    }
                    BinaryOp::And | BinaryOp::Or => {
                        self.expect(&l, &T::Bool, pos)?;
                        self.expect(&r, &T::Bool, pos)?;
                        T::Bool
                    }
                }
            }
            ExprKind::New { class, args } => {
                if class == "List" {
                    self.args(args, &[], "List", pos)?;
                    return Ok(T::List);
                }
                let Some(decl) = self.module.class(class) else {
                    return Err(CheckError::new(pos, format!("unknown class `{class}`")));
                };
                let params: Vec<_> = decl
                    .ctor
                    .as_ref()
                    .map(|c| c.params.iter().map(|p| T::from_decl(&p.ty)).collect())
                    .unwrap_or_default();
                self.args(args, &params, class, pos)?;
                T::Object(class.clone())
            }
            ExprKind::Field { receiver, name } => match self.expr(receiver)? {
                T::Object(class) => {
                    let decl = self.module.class(&class).expect("object types name declared classes");
                    match decl.field(name) {
                        Some(field) => T::from_decl(&field.ty),
                        None => return Err(CheckError::new(pos, format!("class `{class}` has no field `{name}`"))),
                    }
                }
                T::Any => T::Any,
                other => return Err(CheckError::new(pos, format!("{other} has no fields"))),
            },
            ExprKind::Call { receiver: None, name, args } => self.free_call(name, args, pos)?,
            ExprKind::Call { receiver: Some(receiver), name, args } => {
                let is_self = matches!(&receiver.kind, ExprKind::Var(v) if v == "self");
                match self.expr(receiver)? {
                    T::Object(class) => {
                        let decl = self.module.class(&class).expect("object types name declared classes");
                        let Some(m) = decl.method(name) else {
                            return Err(CheckError::new(pos, format!("class `{class}` has no method `{name}`")));
                        };
                        if !m.is_pub && !is_self {
                            return Err(CheckError::new(pos, format!("method `{class}.{name}` is private")));
                        }
                        let params: Vec<_> = m.params.iter().map(|p| T::from_decl(&p.ty)).collect();
                        self.args(args, &params, name, pos)?;
                        T::from_return(m.return_type.as_ref())
                    }
                    T::List => {
                        let Some((_, arity, ret)) = LIST_METHODS.iter().find(|(n, _, _)| n == name) else {
                            return Err(CheckError::new(pos, format!("List has no method `{name}`")));
                        };
                        let params: Vec<T> = match name.as_str() {
                            _ if *arity == 0 => vec![],
                            "add" | "contains" => vec![T::Any],
                            "set" => vec![T::Int, T::Any],
                            _ => vec![T::Int],
                        };
                        self.args(args, &params, name, pos)?;
                        ret.clone()
                    }
                    T::Any => {
                        for arg in args {
                            self.expr(arg)?;
                        }
                        T::Any
                    }
                    other => return Err(CheckError::new(pos, format!("cannot call `{name}` on {other}"))),
                }
            }
        })
    }

    fn free_call(&mut self, name: &str, args: &[Expr], pos: &SourcePos) -> Result<StaticType, CheckError> {
        use StaticType as T;
        if TEST_BUILTINS.contains(&name) && !self.in_test {
            return Err(CheckError::new(pos, format!("`{name}` is only allowed in tests")));
        }
        Ok(match name {
            "random" => {
                self.args(args, &[T::Int], name, pos)?;
                T::Int
            }
            "len" => {
                self.args(args, &[T::Str], name, pos)?;
                T::Int
            }
            ASSERT_EQ => {
                self.args(args, &[T::Any, T::Any], name, pos)?;
                T::Void
            }
            ASSERT_TRUE | ASSERT_FALSE => {
                self.args(args, &[T::Bool], name, pos)?;
                T::Void
            }
            OBSERVE => {
                self.args(args, &[], name, pos)?;
                T::Void
            }
            _ => {
                let Some(f) = self.module.function(name) else {
                    return Err(CheckError::new(pos, format!("unknown function `{name}`")));
                };
                let params: Vec<_> = f.params.iter().map(|p| T::from_decl(&p.ty)).collect();
                self.args(args, &params, name, pos)?;
                T::from_return(f.return_type.as_ref())
            }
        })
    }
}

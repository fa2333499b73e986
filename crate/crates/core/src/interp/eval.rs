use std::cell::RefCell;
use std::collections::BTreeSet;
use std::rc::Rc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::value::{Object, ObservedValue, Value};
use super::Observation;
use crate::program::Program;
use crate::syntax::*;

/// Maximum call depth before a `stack overflow` exception is raised.
pub const MAX_CALL_DEPTH: usize = 200;

/// Abnormal termination of a statement.
#[derive(Debug)]
pub(crate) enum Fault {
    /// A MiniLang exception: `throw` or a runtime error.
    Thrown { pos: SourcePos, message: String },
    Assert { pos: SourcePos, expected: String, actual: String },
    Budget,
}

pub(crate) enum Unwind {
    Return(Value),
    Fault(Fault),
}

impl From<Fault> for Unwind {
    fn from(f: Fault) -> Self {
        Unwind::Fault(f)
    }
}

type Exec<T> = Result<T, Unwind>;

fn thrown<T>(pos: &SourcePos, message: impl Into<String>) -> Exec<T> {
    Err(Unwind::Fault(Fault::Thrown { pos: pos.clone(), message: message.into() }))
}

pub(crate) struct Frame {
    scopes: Vec<Vec<(String, Value)>>,
    this: Option<Value>,
    /// Statements of application code are recorded as covered.
    in_program: bool,
}

impl Frame {
    pub(crate) fn test() -> Self {
        Frame { scopes: vec![Vec::new()], this: None, in_program: false }
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        self.scopes.iter().rev().find_map(|s| s.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v))
    }

    fn lookup_mut(&mut self, name: &str) -> Option<&mut Value> {
        self.scopes.iter_mut().rev().find_map(|s| s.iter_mut().rev().find(|(n, _)| n == name).map(|(_, v)| v))
    }

    fn declare(&mut self, name: &str, value: Value) {
        if let Some(scope) = self.scopes.last_mut() {
            scope.push((name.to_string(), value));
        }
    }
}

pub(crate) struct Machine<'p> {
    program: &'p Program,
    steps: u64,
    budget: u64,
    depth: usize,
    rng: ChaCha8Rng,
    instrument: bool,
    pub(crate) coverage: BTreeSet<NodeId>,
    pub(crate) observations: Vec<Observation>,
}

impl<'p> Machine<'p> {
    pub(crate) fn new(program: &'p Program, budget: u64, seed: u64, instrument: bool) -> Self {
        Machine {
            program,
            steps: 0,
            budget,
            depth: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            instrument,
            coverage: BTreeSet::new(),
            observations: Vec::new(),
        }
    }

    fn tick(&mut self) -> Result<(), Fault> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(Fault::Budget)
        } else {
            Ok(())
        }
    }

    pub(crate) fn exec_block(&mut self, frame: &mut Frame, stmts: &[Stmt]) -> Exec<()> {
        frame.scopes.push(Vec::new());
        let depth = frame.scopes.len();
        let mut result = Ok(());
        for stmt in stmts {
            result = self.exec(frame, stmt);
            if result.is_err() {
                break;
            }
        }
        frame.scopes.truncate(depth - 1);
        result
    }

    pub(crate) fn exec(&mut self, frame: &mut Frame, stmt: &Stmt) -> Exec<()> {
        self.tick()?;
        if frame.in_program {
            self.coverage.insert(stmt.meta.id);
        }
        let pos = &stmt.meta.pos;
        match &stmt.kind {
            StmtKind::VarDecl { name, init, .. } => {
                let v = self.eval(frame, init)?;
                frame.declare(name, v);
            }
            StmtKind::Assign { target, value } => {
                let v = self.eval(frame, value)?;
                self.store(frame, target, v)?;
            }
            StmtKind::CompoundAssign { target, op, value } => {
                let current = self.eval(frame, target)?;
                let delta = self.eval(frame, value)?;
                let (Value::Int(a), Value::Int(b)) = (&current, &delta) else {
                    return thrown(pos, "type error: compound assignment needs ints");
                };
                let result = match op {
                    CompoundOp::Add => a.checked_add(*b),
                    CompoundOp::Sub => a.checked_sub(*b),
                };
                match result {
                    Some(v) => self.store(frame, target, Value::Int(v))?,
                    None => return thrown(pos, "integer overflow"),
                }
            }
            StmtKind::If { cond, then_block, else_block } => {
                if self.condition(frame, cond)? {
                    self.exec_block(frame, then_block)?;
                } else if let Some(else_block) = else_block {
                    self.exec_block(frame, else_block)?;
                }
            }
            StmtKind::While { cond, body } => {
                while self.condition(frame, cond)? {
                    self.exec_block(frame, body)?;
                    self.tick()?;
                }
            }
            StmtKind::Return(value) => {
                let v = match value {
                    Some(e) => self.eval(frame, e)?,
                    None => Value::Null,
                };
                return Err(Unwind::Return(v));
            }
            StmtKind::Throw(e) => {
                let message = match self.eval(frame, e)? {
                    Value::Str(s) => s.to_string(),
                    other => other.to_string(),
                };
                return thrown(pos, message);
            }
            StmtKind::AssertThrows { message, body } => match self.exec_block(frame, body) {
                Ok(()) => {
                    return Err(Fault::Assert {
                        pos: pos.clone(),
                        expected: format!("exception {}", quote(message)),
                        actual: "no exception".into(),
                    }
                    .into())
                }
                Err(Unwind::Fault(Fault::Thrown { message: got, .. })) => {
                    if &got != message {
                        return Err(Fault::Assert {
                            pos: pos.clone(),
                            expected: format!("exception {}", quote(message)),
                            actual: format!("exception {}", quote(&got)),
                        }
                        .into());
                    }
                }
                Err(other) => return Err(other),
            },
            StmtKind::Expr(e) => {
                self.eval(frame, e)?;
            }
        }
        Ok(())
    }

    fn condition(&mut self, frame: &mut Frame, cond: &Expr) -> Exec<bool> {
        match self.eval(frame, cond)? {
            Value::Bool(b) => Ok(b),
            _ => thrown(&cond.meta.pos, "type error: condition is not a bool"),
        }
    }

    fn store(&mut self, frame: &mut Frame, target: &Expr, value: Value) -> Exec<()> {
        match &target.kind {
            ExprKind::Var(name) => match frame.lookup_mut(name) {
                Some(slot) => {
                    *slot = value;
                    Ok(())
                }
                None => thrown(&target.meta.pos, format!("undefined variable `{name}`")),
            },
            ExprKind::Field { receiver, name } => {
                let obj = self.eval(frame, receiver)?;
                let Value::Object(obj) = obj else {
                    return thrown(&target.meta.pos, "null dereference");
                };
                let mut obj = obj.borrow_mut();
                match obj.fields.iter_mut().find(|(n, _)| n == name) {
                    Some((_, slot)) => {
                        *slot = value;
                        Ok(())
                    }
                    None => thrown(&target.meta.pos, format!("no field `{name}`")),
                }
            }
            _ => thrown(&target.meta.pos, "invalid assignment target"),
        }
    }

    pub(crate) fn eval(&mut self, frame: &mut Frame, e: &Expr) -> Exec<Value> {
        self.tick()?;
        let pos = &e.meta.pos;
        Ok(match &e.kind {
            ExprKind::Int(v) => Value::Int(*v),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Str(s) => Value::Str(Rc::from(s.as_str())),
            ExprKind::Null => Value::Null,
            ExprKind::Var(name) if name == "self" => match &frame.this {
                Some(this) => this.clone(),
                None => return thrown(pos, "`self` outside of a method"),
            },
            ExprKind::Var(name) => match frame.lookup(name) {
                Some(v) => v.clone(),
                None => return thrown(pos, format!("undefined variable `{name}`")),
            },
            ExprKind::Unary { op, operand } => match (op, self.eval(frame, operand)?) {
                (UnaryOp::Neg, Value::Int(v)) => match v.checked_neg() {
                    Some(v) => Value::Int(v),
                    None => return thrown(pos, "integer overflow"),
                },
                (UnaryOp::Not, Value::Bool(b)) => Value::Bool(!b),
                _ => return thrown(pos, "type error: bad unary operand"),
            },
            ExprKind::Binary { op, lhs, rhs } => self.binary(frame, *op, lhs, rhs, pos)?,
            ExprKind::New { class, args } => {
                let args = self.eval_args(frame, args)?;
                self.construct(class, args, pos)?
            }
            ExprKind::Field { receiver, name } => match self.eval(frame, receiver)? {
                Value::Object(obj) => {
                    let obj = obj.borrow();
                    match obj.fields.iter().find(|(n, _)| n == name) {
                        Some((_, v)) => v.clone(),
                        None => return thrown(pos, format!("no field `{name}`")),
                    }
                }
                Value::Null => return thrown(pos, "null dereference"),
                _ => return thrown(pos, "type error: field access on a primitive"),
            },
            ExprKind::Call { receiver: None, name, args } => self.free_call(frame, name, args, pos)?,
            ExprKind::Call { receiver: Some(receiver), name, args } => {
                let target = self.eval(frame, receiver)?;
                let args = self.eval_args(frame, args)?;
                self.method_call(target, name, args, pos)?
            }
        })
    }

    fn eval_args(&mut self, frame: &mut Frame, args: &[Expr]) -> Exec<Vec<Value>> {
        args.iter().map(|a| self.eval(frame, a)).collect()
    }

    fn binary(&mut self, frame: &mut Frame, op: BinaryOp, lhs: &Expr, rhs: &Expr, pos: &SourcePos) -> Exec<Value> {
        if matches!(op, BinaryOp::And | BinaryOp::Or) {
            let l = self.condition(frame, lhs)?;
            if (op == BinaryOp::And) != l {
                return Ok(Value::Bool(l));
            }
            return Ok(Value::Bool(self.condition(frame, rhs)?));
        }
        let l = self.eval(frame, lhs)?;
        let r = self.eval(frame, rhs)?;
        match op {
            BinaryOp::Eq => return Ok(Value::Bool(l.same(&r))),
            BinaryOp::Ne => return Ok(Value::Bool(!l.same(&r))),
            BinaryOp::Add => {
                if let (Value::Str(a), Value::Str(b)) = (&l, &r) {
                    return Ok(Value::Str(Rc::from(format!("{a}{b}"))));
                }
            }
            _ => {}
        }
        let (Value::Int(a), Value::Int(b)) = (l, r) else {
            return thrown(pos, format!("type error: `{}` needs ints", op.symbol()));
        };
        let arith = |v: Option<i64>| match v {
            Some(v) => Ok(Value::Int(v)),
            None => thrown(pos, "integer overflow"),
        };
        match op {
            BinaryOp::Add => arith(a.checked_add(b)),
            BinaryOp::Sub => arith(a.checked_sub(b)),
            BinaryOp::Mul => arith(a.checked_mul(b)),
            BinaryOp::Div | BinaryOp::Rem if b == 0 => thrown(pos, "division by zero"),
            BinaryOp::Div => arith(a.checked_div(b)),
            BinaryOp::Rem => arith(a.checked_rem(b)),
            BinaryOp::Lt => Ok(Value::Bool(a < b)),
            BinaryOp::Le => Ok(Value::Bool(a <= b)),
            BinaryOp::Gt => Ok(Value::Bool(a > b)),
            BinaryOp::Ge => Ok(Value::Bool(a >= b)),
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::And | BinaryOp::Or => unreachable!("handled above"),
        }
    }

    fn construct(&mut self, class: &str, args: Vec<Value>, pos: &SourcePos) -> Exec<Value> {
        if class == "List" {
            return Ok(Value::List(Rc::new(RefCell::new(Vec::new()))));
        }
        let program = self.program;
        let Some(decl) = program.class(class) else {
            return thrown(pos, format!("unknown class `{class}`"));
        };
        let fields = decl.fields.iter().map(|f| (f.name.clone(), Value::default_for(&f.ty))).collect();
        let obj = Value::Object(Rc::new(RefCell::new(Object { class: Rc::from(class), fields })));
        if let Some(ctor) = &decl.ctor {
            self.invoke(ctor, Some(obj.clone()), args, pos)?;
        }
        Ok(obj)
    }

    fn free_call(&mut self, frame: &mut Frame, name: &str, args: &[Expr], pos: &SourcePos) -> Exec<Value> {
        match name {
            ASSERT_EQ => {
                let expected = self.eval(frame, &args[0])?;
                let actual = self.eval(frame, &args[1])?;
                if !expected.same(&actual) {
                    return Err(Fault::Assert {
                        pos: pos.clone(),
                        expected: expected.to_string(),
                        actual: actual.to_string(),
                    }
                    .into());
                }
                Ok(Value::Null)
            }
            ASSERT_TRUE | ASSERT_FALSE => {
                let want = name == ASSERT_TRUE;
                let v = self.eval(frame, &args[0])?;
                if !matches!(v, Value::Bool(b) if b == want) {
                    return Err(Fault::Assert { pos: pos.clone(), expected: want.to_string(), actual: v.to_string() }.into());
                }
                Ok(Value::Null)
            }
            OBSERVE => {
                if self.instrument {
                    self.observe(frame)?;
                }
                Ok(Value::Null)
            }
            _ => {
                let args = self.eval_args(frame, args)?;
                match name {
                    "random" => match args[..] {
                        [Value::Int(bound)] if bound > 0 => Ok(Value::Int(self.rng.gen_range(0..bound))),
                        _ => thrown(pos, "random bound must be positive"),
                    },
                    "len" => match &args[..] {
                        [Value::Str(s)] => Ok(Value::Int(s.chars().count() as i64)),
                        _ => thrown(pos, "null dereference"),
                    },
                    _ => {
                        let program = self.program;
                        match program.function(name) {
                            Some(f) => self.invoke(f, None, args, pos),
                            None => thrown(pos, format!("unknown function `{name}`")),
                        }
                    }
                }
            }
        }
    }

    pub(crate) fn method_call(&mut self, target: Value, name: &str, args: Vec<Value>, pos: &SourcePos) -> Exec<Value> {
        match &target {
            Value::Object(obj) => {
                let class = obj.borrow().class.clone();
                let program = self.program;
                let Some(method) = program.class(&class).and_then(|c| c.method(name)) else {
                    return thrown(pos, format!("no method `{class}.{name}`"));
                };
                self.invoke(method, Some(target), args, pos)
            }
            Value::List(list) => list_method(list, name, args, pos),
            Value::Null => thrown(pos, "null dereference"),
            _ => thrown(pos, format!("type error: no method `{name}` on a primitive")),
        }
    }

    fn invoke(&mut self, method: &MethodDecl, this: Option<Value>, args: Vec<Value>, pos: &SourcePos) -> Exec<Value> {
        if self.depth >= MAX_CALL_DEPTH {
            return thrown(pos, "stack overflow");
        }
        if args.len() != method.params.len() {
            return thrown(pos, format!("`{}` expects {} argument(s)", method.name, method.params.len()));
        }
        let params = method.params.iter().map(|p| p.name.clone()).zip(args).collect();
        let mut frame = Frame { scopes: vec![params], this, in_program: true };
        self.depth += 1;
        let result = self.exec_block(&mut frame, &method.body);
        self.depth -= 1;
        match result {
            Ok(()) if method.is_void() => Ok(Value::Null),
            Ok(()) => thrown(&method.meta.pos, format!("`{}` finished without returning a value", method.name)),
            Err(Unwind::Return(v)) => Ok(v),
            Err(fault) => Err(fault),
        }
    }

    /// Records every public getter of every live object variable, in
    /// declaration order then getter-name order.
    fn observe(&mut self, frame: &Frame) -> Exec<()> {
        let subjects: Vec<(String, Value)> = frame
            .scopes
            .iter()
            .flatten()
            .filter(|(_, v)| matches!(v, Value::Object(_)))
            .cloned()
            .collect();
        let program = self.program;
        for (name, value) in subjects {
            let Value::Object(obj) = &value else { continue };
            let class = obj.borrow().class.clone();
            let Some(decl) = program.class(&class) else { continue };
            for getter in decl.getters() {
                let observed = match self.invoke(getter, Some(value.clone()), Vec::new(), &getter.meta.pos) {
                    Ok(v) => v.snapshot(),
                    Err(Unwind::Fault(Fault::Thrown { message, .. })) => ObservedValue::Thrown { message },
                    Err(Unwind::Fault(Fault::Budget)) => return Err(Fault::Budget.into()),
                    Err(Unwind::Fault(Fault::Assert { .. }) | Unwind::Return(_)) => continue,
                };
                let point_id = self.observations.len() as u32;
                self.observations.push(Observation {
                    point_id,
                    subject: name.clone(),
                    getter: getter.name.clone(),
                    value: observed,
                });
            }
        }
        Ok(())
    }
}

fn list_method(list: &Rc<RefCell<Vec<Value>>>, name: &str, args: Vec<Value>, pos: &SourcePos) -> Exec<Value> {
    let index = |v: &Value, len: usize| match v {
        Value::Int(i) if *i >= 0 && (*i as usize) < len => Ok(*i as usize),
        Value::Int(i) => thrown(pos, format!("index out of bounds: {i}")),
        _ => thrown(pos, "type error: index is not an int"),
    };
    let mut items = list.borrow_mut();
    match (name, args.as_slice()) {
        ("add", [v]) => {
            items.push(v.clone());
            Ok(Value::Null)
        }
        ("set", [i, v]) => {
            let i = index(i, items.len())?;
            items[i] = v.clone();
            Ok(Value::Null)
        }
        ("get", [i]) => {
            let i = index(i, items.len())?;
            Ok(items[i].clone())
        }
        ("remove", [i]) => {
            let i = index(i, items.len())?;
            Ok(items.remove(i))
        }
        ("contains", [v]) => Ok(Value::Bool(items.iter().any(|x| x.same(v)))),
        ("size", []) => Ok(Value::Int(items.len() as i64)),
        ("is_empty", []) => Ok(Value::Bool(items.is_empty())),
        _ => thrown(pos, format!("no method `List.{name}`")),
    }
}

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::syntax::{quote, Type};

#[derive(Debug)]
pub struct Object {
    pub class: Rc<str>,
    pub fields: Vec<(String, Value)>,
}

/// A runtime value. Objects and lists are shared references.
#[derive(Clone, Debug)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(Rc<str>),
    Null,
    Object(Rc<RefCell<Object>>),
    List(Rc<RefCell<Vec<Value>>>),
}

impl Value {
    pub fn default_for(ty: &Type) -> Value {
        match ty {
            Type::Int => Value::Int(0),
            Type::Bool => Value::Bool(false),
            Type::Str => Value::Str(Rc::from("")),
            Type::List | Type::Class(_) => Value::Null,
        }
    }

    /// `==` semantics: primitives by value, references by identity.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Null, Value::Null) => true,
            (Value::Object(a), Value::Object(b)) => Rc::ptr_eq(a, b),
            (Value::List(a), Value::List(b)) => Rc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Detached copy suitable for reporting.
    pub fn snapshot(&self) -> ObservedValue {
        match self {
            Value::Int(v) => ObservedValue::Int(*v),
            Value::Bool(b) => ObservedValue::Bool(*b),
            Value::Str(s) => ObservedValue::Str(s.to_string()),
            Value::Null => ObservedValue::Null,
            Value::Object(o) => ObservedValue::Object { class: o.borrow().class.to_string() },
            Value::List(l) => ObservedValue::List { len: l.borrow().len() },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.snapshot().fmt(f)
    }
}

/// A value captured at an observation point, or the message of the
/// exception the getter threw.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObservedValue {
    Int(i64),
    Bool(bool),
    Str(String),
    Null,
    Object { class: String },
    List { len: usize },
    Thrown { message: String },
}

impl fmt::Display for ObservedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservedValue::Int(v) => write!(f, "{v}"),
            ObservedValue::Bool(b) => write!(f, "{b}"),
            ObservedValue::Str(s) => f.write_str(&quote(s)),
            ObservedValue::Null => f.write_str("null"),
            ObservedValue::Object { class } => write!(f, "<{class}>"),
            ObservedValue::List { len } => write!(f, "<List of {len}>"),
            ObservedValue::Thrown { message } => write!(f, "<threw {}>", quote(message)),
        }
    }
}

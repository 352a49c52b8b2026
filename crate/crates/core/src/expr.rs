//! Attribute expressions used in constraints, assignments and statements.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{Model, ObjectId, Value};

/// What a name is bound to during execution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Datum {
    Value(Value),
    Object(ObjectId),
}

impl From<Value> for Datum {
    fn from(v: Value) -> Self {
        Datum::Value(v)
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Value(v) => v.fmt(f),
            Datum::Object(o) => o.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    /// String `+`; chosen over `Add` from the operand types.
    Concat,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add | BinOp::Concat => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "=",
            BinOp::Ne => "<>",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Literal(Value),
    /// A pattern element, parameter or variable.
    Name(String),
    /// `object.attr`
    Attr {
        object: String,
        attr: String,
    },
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Literal(Value::Integer(v))
    }

    pub fn string(v: &str) -> Expr {
        Expr::Literal(Value::String(v.to_string()))
    }

    pub fn name(n: &str) -> Expr {
        Expr::Name(n.to_string())
    }

    pub fn attr(object: &str, attr: &str) -> Expr {
        Expr::Attr {
            object: object.to_string(),
            attr: attr.to_string(),
        }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// Every name the expression reads.
    pub fn names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Literal(_) => {}
            Expr::Name(n) => out.push(n),
            Expr::Attr { object, .. } => out.push(object),
            Expr::Neg(e) | Expr::Not(e) => e.collect_names(out),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.collect_names(out);
                rhs.collect_names(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("`{0}` is not an object")]
    NotAnObject(String),
    #[error("object bound to `{0}` no longer exists")]
    Deleted(String),
    #[error("attribute `{attr}` of `{object}` is not set")]
    AbsentSlot { object: String, attr: String },
    #[error("integer overflow in `{0}`")]
    Overflow(&'static str),
    #[error("operator `{op}` cannot be applied to {operands}")]
    Type { op: &'static str, operands: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("name `{0}` is already bound")]
pub struct RebindError(pub String);

/// Names bound during execution: pattern elements, parameters and variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    map: BTreeMap<String, Datum>,
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn get(&self, name: &str) -> Option<&Datum> {
        self.map.get(name)
    }

    pub fn object(&self, name: &str) -> Option<ObjectId> {
        match self.map.get(name) {
            Some(Datum::Object(o)) => Some(*o),
            _ => None,
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    /// Binds a new name; binding a name twice is an error.
    pub fn bind(&mut self, name: impl Into<String>, datum: Datum) -> Result<(), RebindError> {
        let name = name.into();
        if self.map.contains_key(&name) {
            return Err(RebindError(name));
        }
        self.map.insert(name, datum);
        Ok(())
    }

    /// Binds or overwrites (used for variables).
    pub fn set(&mut self, name: impl Into<String>, datum: Datum) {
        self.map.insert(name.into(), datum);
    }

    pub fn remove(&mut self, name: &str) -> Option<Datum> {
        self.map.remove(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Datum)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Evaluates `expr` strictly; both operands of `and`/`or` are always
/// evaluated.
pub fn eval(expr: &Expr, bindings: &Bindings, model: &Model) -> Result<Datum, EvalError> {
    match expr {
        Expr::Literal(v) => Ok(Datum::Value(v.clone())),
        Expr::Name(n) => bindings
            .get(n)
            .cloned()
            .ok_or_else(|| EvalError::Unbound(n.clone())),
        Expr::Attr { object, attr } => {
            let id = match bindings.get(object) {
                Some(Datum::Object(id)) => *id,
                Some(Datum::Value(_)) => return Err(EvalError::NotAnObject(object.clone())),
                None => return Err(EvalError::Unbound(object.clone())),
            };
            let obj = model
                .object(id)
                .ok_or_else(|| EvalError::Deleted(object.clone()))?;
            obj.slots
                .get(attr)
                .cloned()
                .map(Datum::Value)
                .ok_or_else(|| EvalError::AbsentSlot {
                    object: object.clone(),
                    attr: attr.clone(),
                })
        }
        Expr::Neg(e) => match eval(e, bindings, model)? {
            Datum::Value(Value::Integer(i)) => i
                .checked_neg()
                .map(|v| Datum::Value(Value::Integer(v)))
                .ok_or(EvalError::Overflow("-")),
            other => Err(type_error("-", &[&other])),
        },
        Expr::Not(e) => match eval(e, bindings, model)? {
            Datum::Value(Value::Boolean(b)) => Ok(Datum::Value(Value::Boolean(!b))),
            other => Err(type_error("not", &[&other])),
        },
        Expr::Binary { op, lhs, rhs } => {
            let l = eval(lhs, bindings, model)?;
            let r = eval(rhs, bindings, model)?;
            binary(*op, l, r).map(Datum::Value)
        }
    }
}

fn type_error(op: &'static str, operands: &[&Datum]) -> EvalError {
    EvalError::Type {
        op,
        operands: operands
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    }
}

fn binary(op: BinOp, l: Datum, r: Datum) -> Result<Value, EvalError> {
    use Value::*;
    let sym = op.symbol();
    let arith = |f: fn(i64, i64) -> Option<i64>, l: &Datum, r: &Datum| match (l, r) {
        (Datum::Value(Integer(a)), Datum::Value(Integer(b))) => {
            f(*a, *b).map(Integer).ok_or(EvalError::Overflow(sym))
        }
        _ => Err(type_error(sym, &[l, r])),
    };
    match op {
        BinOp::Add => arith(i64::checked_add, &l, &r),
        BinOp::Sub => arith(i64::checked_sub, &l, &r),
        BinOp::Mul => arith(i64::checked_mul, &l, &r),
        BinOp::Concat => match (&l, &r) {
            (Datum::Value(String(a)), Datum::Value(String(b))) => Ok(String(format!("{a}{b}"))),
            _ => Err(type_error(sym, &[&l, &r])),
        },
        BinOp::Eq | BinOp::Ne => {
            let comparable = matches!(
                (&l, &r),
                (Datum::Object(_), Datum::Object(_))
                    | (Datum::Value(Integer(_)), Datum::Value(Integer(_)))
                    | (Datum::Value(String(_)), Datum::Value(String(_)))
                    | (Datum::Value(Boolean(_)), Datum::Value(Boolean(_)))
            );
            if !comparable {
                return Err(type_error(sym, &[&l, &r]));
            }
            Ok(Boolean((l == r) == (op == BinOp::Eq)))
        }
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let ord = match (&l, &r) {
                (Datum::Value(Integer(a)), Datum::Value(Integer(b))) => a.cmp(b),
                (Datum::Value(String(a)), Datum::Value(String(b))) => a.cmp(b),
                _ => return Err(type_error(sym, &[&l, &r])),
            };
            Ok(Boolean(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Le => ord.is_le(),
                BinOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            }))
        }
        BinOp::And | BinOp::Or => match (&l, &r) {
            (Datum::Value(Boolean(a)), Datum::Value(Boolean(b))) => {
                Ok(Boolean(if op == BinOp::And { *a && *b } else { *a || *b }))
            }
            _ => Err(type_error(sym, &[&l, &r])),
        },
    }
}

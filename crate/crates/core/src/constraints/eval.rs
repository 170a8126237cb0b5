use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::terms::{Term, Value, Var};

/// Runtime values for evaluation; integers are widened to avoid overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Val {
    Int(i128),
    Bool(bool),
}

impl Val {
    pub(crate) fn as_bool(self) -> Result<bool> {
        match self {
            Val::Bool(b) => Ok(b),
            Val::Int(_) => Err(Error::SortMismatch("expected a Bool".into())),
        }
    }

    pub(crate) fn as_int(self) -> Result<i128> {
        match self {
            Val::Int(n) => Ok(n),
            Val::Bool(_) => Err(Error::SortMismatch("expected an Int".into())),
        }
    }

    pub(crate) fn to_value(self) -> Result<Value> {
        Ok(match self {
            Val::Bool(b) => Value::Bool(b),
            Val::Int(n) => Value::Int(i64::try_from(n).map_err(|_| Error::Overflow)?),
        })
    }
}

impl From<Value> for Val {
    fn from(v: Value) -> Self {
        match v {
            Value::Bool(b) => Val::Bool(b),
            Value::Int(n) => Val::Int(n as i128),
        }
    }
}

/// Apply a built-in operator to evaluated arguments.
pub(crate) fn apply_op(name: &str, args: &[Val]) -> Result<Val> {
    use Val::*;
    let unsupported = || Error::UnsupportedTheory(format!("symbol `{name}`/{}", args.len()));
    Ok(match (name, args) {
        ("+", [Int(a), Int(b)]) => Int(a.checked_add(*b).ok_or(Error::Overflow)?),
        ("-", [Int(a), Int(b)]) => Int(a.checked_sub(*b).ok_or(Error::Overflow)?),
        ("-", [Int(a)]) => Int(a.checked_neg().ok_or(Error::Overflow)?),
        ("*", [Int(a), Int(b)]) => Int(a.checked_mul(*b).ok_or(Error::Overflow)?),
        ("<", [Int(a), Int(b)]) => Bool(a < b),
        ("<=", [Int(a), Int(b)]) => Bool(a <= b),
        (">", [Int(a), Int(b)]) => Bool(a > b),
        (">=", [Int(a), Int(b)]) => Bool(a >= b),
        ("=", [a, b]) => Bool(a == b),
        ("and", [Bool(a), Bool(b)]) => Bool(*a && *b),
        ("or", [Bool(a), Bool(b)]) => Bool(*a || *b),
        ("not", [Bool(a)]) => Bool(!a),
        ("=>", [Bool(a), Bool(b)]) => Bool(!a || *b),
        ("<=>", [Bool(a), Bool(b)]) => Bool(a == b),
        _ => return Err(unsupported()),
    })
}

/// Evaluate a theory term under a valuation of its variables.
pub(crate) fn eval_term(t: &Term, env: &HashMap<Var, Val>) -> Result<Val> {
    match t {
        Term::Var(x) => env
            .get(x)
            .copied()
            .ok_or_else(|| Error::IllFormed(format!("unassigned variable `{x}`"))),
        Term::Val(v) => Ok((*v).into()),
        Term::App(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term(a, env))
                .collect::<Result<Vec<_>>>()?;
            apply_op(&f.name, &vals)
        }
    }
}

/// Replace ground built-in subterms by their values.
pub(crate) fn fold_constants(t: &Term) -> Term {
    match t {
        Term::App(f, args) if !args.is_empty() && f.is_theory() => {
            let args: Vec<Term> = args.iter().map(fold_constants).collect();
            let vals: Option<Vec<Val>> = args
                .iter()
                .map(|a| match a {
                    Term::Val(v) => Some(Val::from(*v)),
                    _ => None,
                })
                .collect();
            if let Some(vals) = vals {
                if let Ok(v) = apply_op(&f.name, &vals).and_then(Val::to_value) {
                    return Term::Val(v);
                }
            }
            Term::App(f.clone(), args.into())
        }
        _ => t.clone(),
    }
}

//! Values read back from a model.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use super::sexp::Sexp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    /// Finite graph of an array: explicit entries over a default.
    Array {
        entries: BTreeMap<BigInt, BigInt>,
        default: Option<BigInt>,
    },
    Unavailable,
}

impl Value {
    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Parse a value as printed in a `get-value` reply.
    pub fn from_sexp(s: &Sexp) -> Value {
        if let Some(v) = int_of(s) {
            return Value::Int(v);
        }
        match s.as_atom() {
            Some("true") => return Value::Bool(true),
            Some("false") => return Value::Bool(false),
            _ => {}
        }
        array_of(s).unwrap_or(Value::Unavailable)
    }

    /// SMT-LIB rendering; `from_sexp` inverts it.
    pub fn to_smt(&self) -> String {
        match self {
            Value::Int(v) => int_smt(v),
            Value::Bool(b) => b.to_string(),
            Value::Array { entries, default } => {
                let mut s = format!(
                    "((as const (Array Int Int)) {})",
                    int_smt(&default.clone().unwrap_or_default())
                );
                for (i, v) in entries {
                    s = format!("(store {s} {} {})", int_smt(i), int_smt(v));
                }
                s
            }
            Value::Unavailable => "unavailable".into(),
        }
    }
}

fn int_smt(v: &BigInt) -> String {
    if v.sign() == num_bigint::Sign::Minus {
        format!("(- {})", v.magnitude())
    } else {
        v.to_string()
    }
}

fn int_of(s: &Sexp) -> Option<BigInt> {
    match s {
        Sexp::Atom(a) => a.parse().ok().filter(|_| a.chars().all(|c| c.is_ascii_digit())),
        Sexp::List(l) => match l.as_slice() {
            [Sexp::Atom(m), x] if m == "-" => int_of(x).map(|v| -v),
            _ => None,
        },
    }
}

fn array_of(s: &Sexp) -> Option<Value> {
    let l = s.as_list()?;
    match l {
        [head, d]
            if head
                .as_list()
                .is_some_and(|h| h.first().and_then(Sexp::as_atom) == Some("as")) =>
        {
            Some(Value::Array {
                entries: BTreeMap::new(),
                default: Some(int_of(d)?),
            })
        }
        [Sexp::Atom(st), a, i, v] if st == "store" => match array_of(a)? {
            Value::Array { mut entries, default } => {
                entries.insert(int_of(i)?, int_of(v)?);
                Some(Value::Array { entries, default })
            }
            _ => None,
        },
        _ => None,
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Array { .. } => f.write_str(&self.to_smt()),
            Value::Unavailable => f.write_str("?"),
        }
    }
}

/// Logical symbol or term to value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelValues {
    pub values: BTreeMap<String, Value>,
}

impl ModelValues {
    pub fn get(&self, key: &str) -> &Value {
        self.values.get(key).unwrap_or(&Value::Unavailable)
    }

    pub fn int(&self, key: &str) -> Option<&BigInt> {
        self.get(key).as_int()
    }

    pub fn bool(&self, key: &str) -> Option<bool> {
        self.get(key).as_bool()
    }
}

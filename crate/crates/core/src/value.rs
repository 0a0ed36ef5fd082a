//! Concrete values shared by traces and the interpreter.

use std::fmt;

use num_bigint::BigInt;

use crate::typecheck::Type;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Int(BigInt),
    Bool(bool),
    /// `None` is the null array.
    Array(Option<Vec<BigInt>>),
}

impl Val {
    pub fn int(v: i64) -> Val {
        Val::Int(BigInt::from(v))
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Val::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Val::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Read a command-line literal (`-3`, `true`, `null`, `[1, 2]`) of the
    /// given type.
    pub fn parse_as(text: &str, ty: Type, nullable: bool) -> Result<Val, String> {
        let t = text.trim();
        let int = |s: &str| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| format!("`{s}` is not an integer"))
        };
        match ty {
            Type::Int => int(t).map(Val::Int),
            Type::Bool => match t {
                "true" => Ok(Val::Bool(true)),
                "false" => Ok(Val::Bool(false)),
                _ => Err(format!("`{t}` is not a boolean")),
            },
            Type::IntArray if t == "null" => {
                if nullable {
                    Ok(Val::Array(None))
                } else {
                    Err("null given for a non-null array".to_string())
                }
            }
            Type::IntArray => {
                let inner = t
                    .strip_prefix('[')
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(|| format!("`{t}` is not an array literal like [1, 2]"))?;
                if inner.trim().is_empty() {
                    return Ok(Val::Array(Some(Vec::new())));
                }
                inner
                    .split(',')
                    .map(int)
                    .collect::<Result<_, _>>()
                    .map(|v| Val::Array(Some(v)))
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        fn num(v: &BigInt) -> serde_json::Value {
            i64::try_from(v)
                .map(serde_json::Value::from)
                .unwrap_or_else(|_| serde_json::Value::from(v.to_string()))
        }
        match self {
            Val::Int(v) => num(v),
            Val::Bool(b) => serde_json::Value::Bool(*b),
            Val::Array(None) => serde_json::Value::Null,
            Val::Array(Some(items)) => serde_json::Value::Array(items.iter().map(num).collect()),
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Int(v) => write!(f, "{v}"),
            Val::Bool(b) => write!(f, "{b}"),
            Val::Array(None) => f.write_str("null"),
            Val::Array(Some(items)) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "] (length {})", items.len())
            }
        }
    }
}

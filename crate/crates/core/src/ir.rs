//! Logical terms used by guarded commands, passive graphs and VCs.
//!
//! Before passification `Var` names program variables; afterwards it names
//! incarnation symbols and `Old` no longer occurs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;

use crate::arith::{MAX32, MIN32};
pub use crate::frontend::ast::{BinaryOp, Quantifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Bool,
    /// Integer-indexed integer array (contents only; length and nullness
    /// are tracked as separate cells).
    Array,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Int => "Int",
            Sort::Bool => "Bool",
            Sort::Array => "(Array Int Int)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Int(BigInt),
    Bool(bool),
    Var(String),
    Bound(String),
    Not(Box<Term>),
    Neg(Box<Term>),
    /// `Div`/`Mod` always mean truncating division and remainder.
    Bin(BinaryOp, Box<Term>, Box<Term>),
    Ite(Box<Term>, Box<Term>, Box<Term>),
    Wrap32(Box<Term>),
    Select(Box<Term>, Box<Term>),
    Len(Box<Term>),
    IsNull(Box<Term>),
    Store(Box<Term>, Box<Term>, Box<Term>),
    /// Evaluate the inner term in the state captured by a snapshot tag.
    Old(String, Box<Term>),
    Quant(Quantifier, String, Box<Term>),
    /// Application of a pure method; globals are passed as trailing arguments.
    App(String, Vec<Term>),
}

impl Term {
    pub fn int(v: i64) -> Term {
        Term::Int(BigInt::from(v))
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn bin(op: BinaryOp, a: Term, b: Term) -> Term {
        Term::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn not(t: Term) -> Term {
        match t {
            Term::Bool(b) => Term::Bool(!b),
            Term::Not(inner) => *inner,
            other => Term::Not(Box::new(other)),
        }
    }

    pub fn and(a: Term, b: Term) -> Term {
        match (a, b) {
            (Term::Bool(true), x) | (x, Term::Bool(true)) => x,
            (a, b) => Term::bin(BinaryOp::And, a, b),
        }
    }

    pub fn or(a: Term, b: Term) -> Term {
        match (a, b) {
            (Term::Bool(false), x) | (x, Term::Bool(false)) => x,
            (a, b) => Term::bin(BinaryOp::Or, a, b),
        }
    }

    pub fn implies(a: Term, b: Term) -> Term {
        match a {
            Term::Bool(true) => b,
            a => Term::bin(BinaryOp::Implies, a, b),
        }
    }

    pub fn and_all(ts: impl IntoIterator<Item = Term>) -> Term {
        ts.into_iter().fold(Term::Bool(true), Term::and)
    }

    pub fn or_all(ts: impl IntoIterator<Item = Term>) -> Term {
        ts.into_iter().fold(Term::Bool(false), Term::or)
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::bin(BinaryOp::Eq, a, b)
    }

    pub fn le(a: Term, b: Term) -> Term {
        Term::bin(BinaryOp::Le, a, b)
    }

    pub fn lt(a: Term, b: Term) -> Term {
        Term::bin(BinaryOp::Lt, a, b)
    }

    pub fn select(a: Term, i: Term) -> Term {
        Term::Select(Box::new(a), Box::new(i))
    }

    pub fn len(a: Term) -> Term {
        Term::Len(Box::new(a))
    }

    pub fn is_null(a: Term) -> Term {
        Term::IsNull(Box::new(a))
    }

    pub fn old(tag: &str, t: Term) -> Term {
        Term::Old(tag.to_string(), Box::new(t))
    }

    pub fn forall(var: &str, body: Term) -> Term {
        Term::Quant(Quantifier::Forall, var.to_string(), Box::new(body))
    }

    /// `MIN32 <= t && t <= MAX32`.
    pub fn in_range(t: Term) -> Term {
        Term::and(Term::le(Term::int(MIN32), t.clone()), Term::le(t, Term::int(MAX32)))
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        match self {
            Term::Int(_) | Term::Bool(_) | Term::Var(_) | Term::Bound(_) => {}
            Term::Not(a)
            | Term::Neg(a)
            | Term::Wrap32(a)
            | Term::Len(a)
            | Term::IsNull(a)
            | Term::Old(_, a)
            | Term::Quant(_, _, a) => a.walk(f),
            Term::Bin(_, a, b) | Term::Select(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Term::Ite(a, b, c) | Term::Store(a, b, c) => {
                a.walk(f);
                b.walk(f);
                c.walk(f);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.walk(f)),
        }
    }

    /// Number of AST nodes.
    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        });
        out
    }

    /// Rebuild bottom-up, letting `f` replace any node after its children
    /// were mapped.
    pub fn map(&self, f: &mut dyn FnMut(Term) -> Term) -> Term {
        let mapped = match self {
            Term::Int(_) | Term::Bool(_) | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Not(a) => Term::Not(Box::new(a.map(f))),
            Term::Neg(a) => Term::Neg(Box::new(a.map(f))),
            Term::Wrap32(a) => Term::Wrap32(Box::new(a.map(f))),
            Term::Len(a) => Term::Len(Box::new(a.map(f))),
            Term::IsNull(a) => Term::IsNull(Box::new(a.map(f))),
            Term::Old(tag, a) => Term::Old(tag.clone(), Box::new(a.map(f))),
            Term::Quant(q, v, a) => Term::Quant(*q, v.clone(), Box::new(a.map(f))),
            Term::Bin(op, a, b) => Term::Bin(*op, Box::new(a.map(f)), Box::new(b.map(f))),
            Term::Select(a, b) => Term::Select(Box::new(a.map(f)), Box::new(b.map(f))),
            Term::Ite(a, b, c) => Term::Ite(Box::new(a.map(f)), Box::new(b.map(f)), Box::new(c.map(f))),
            Term::Store(a, b, c) => Term::Store(Box::new(a.map(f)), Box::new(b.map(f)), Box::new(c.map(f))),
            Term::App(n, args) => Term::App(n.clone(), args.iter().map(|a| a.map(f)).collect()),
        };
        f(mapped)
    }

    /// Replace free variables.
    pub fn subst(&self, map: &HashMap<String, Term>) -> Term {
        self.map(&mut |t| match &t {
            Term::Var(v) => map.get(v).cloned().unwrap_or(t),
            _ => t,
        })
    }

    /// Rename snapshot tags.
    pub fn retag(&self, from: &str, to: &str) -> Term {
        self.map(&mut |t| match t {
            Term::Old(tag, inner) if tag == from => Term::Old(to.to_string(), inner),
            other => other,
        })
    }

    pub fn uses_nonlinear(&self) -> bool {
        let mut found = false;
        self.walk(&mut |t| match t {
            Term::Wrap32(_) => found = true,
            Term::Bin(BinaryOp::Div | BinaryOp::Mod, _, _) => found = true,
            Term::Bin(BinaryOp::Mul, a, b) => {
                if !matches!(**a, Term::Int(_)) && !matches!(**b, Term::Int(_)) {
                    found = true
                }
            }
            _ => {}
        });
        found
    }
}

impl fmt::Display for Term {
    /// Compact infix form used in IR dumps and diagnostics.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(v) => write!(f, "{v}"),
            Term::Bool(b) => write!(f, "{b}"),
            Term::Var(v) | Term::Bound(v) => f.write_str(v),
            Term::Not(a) => write!(f, "!{a}"),
            Term::Neg(a) => write!(f, "-{a}"),
            Term::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Term::Ite(c, a, b) => write!(f, "ite({c}, {a}, {b})"),
            Term::Wrap32(a) => write!(f, "wrap32{a}"),
            Term::Select(a, i) => write!(f, "{a}[{i}]"),
            Term::Len(a) => write!(f, "{a}.length"),
            Term::IsNull(a) => write!(f, "isnull({a})"),
            Term::Store(a, i, v) => write!(f, "store({a}, {i}, {v})"),
            Term::Old(tag, a) => write!(f, "old@{tag}({a})"),
            Term::Quant(q, v, body) => {
                let kw = match q {
                    Quantifier::Forall => "forall",
                    Quantifier::Exists => "exists",
                };
                write!(f, "({kw} {v}. {body})")
            }
            Term::App(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

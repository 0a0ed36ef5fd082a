//! Evaluation of guarded-command terms over concrete states.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{Rac, Stop};
use crate::arith::{jdiv, jmod, wrap32};
use crate::ir::{BinaryOp, Quantifier, Term};
use crate::value::Val;

pub type Env = HashMap<String, Val>;

/// Largest quantifier range enumerated before giving up.
pub const MAX_QUANT_SPAN: usize = 10_000;

pub struct TermEval<'a> {
    pub rac: &'a Rac<'a>,
    pub env: &'a Env,
    pub snapshots: &'a HashMap<String, Env>,
    pub depth: usize,
    /// Run pure methods with the direct interpreter.
    pub direct: bool,
}

fn int(v: Val) -> Result<BigInt, Stop> {
    match v {
        Val::Int(i) => Ok(i),
        other => Err(Stop::runtime(format!("expected an integer, found {other}"))),
    }
}

fn boolean(v: Val) -> Result<bool, Stop> {
    match v {
        Val::Bool(b) => Ok(b),
        other => Err(Stop::runtime(format!("expected a boolean, found {other}"))),
    }
}

fn conjuncts<'t>(t: &'t Term, out: &mut Vec<&'t Term>) {
    match t {
        Term::Bin(BinaryOp::And, a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other),
    }
}

fn mentions(t: &Term, v: &str) -> bool {
    let mut found = false;
    t.walk(&mut |x| found |= matches!(x, Term::Bound(b) if b == v));
    found
}

/// Range conditions on `v` in the antecedent of a quantifier body:
/// `(lower, upper)` term lists with inclusive integer adjustments.
fn bound_terms<'t>(q: Quantifier, v: &str, body: &'t Term) -> Option<(Vec<(&'t Term, i64)>, Vec<(&'t Term, i64)>)> {
    let mut ante = Vec::new();
    match (q, body) {
        (Quantifier::Forall, Term::Bin(BinaryOp::Implies, a, b)) => {
            conjuncts(a, &mut ante);
            // Nested implications contribute their antecedents as well.
            let mut rest = &**b;
            while let Term::Bin(BinaryOp::Implies, c, d) = rest {
                conjuncts(c, &mut ante);
                rest = d;
            }
        }
        (Quantifier::Exists, Term::Bin(BinaryOp::And, ..)) => conjuncts(body, &mut ante),
        _ => return None,
    }
    let is_v = |t: &Term| matches!(t, Term::Bound(b) if b == v);
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for c in ante {
        let Term::Bin(op, a, b) = c else { continue };
        let (a, b) = (&**a, &**b);
        match op {
            BinaryOp::Le if is_v(b) && !mentions(a, v) => lo.push((a, 0)),
            BinaryOp::Lt if is_v(b) && !mentions(a, v) => lo.push((a, 1)),
            BinaryOp::Ge if is_v(a) && !mentions(b, v) => lo.push((b, 0)),
            BinaryOp::Gt if is_v(a) && !mentions(b, v) => lo.push((b, 1)),
            BinaryOp::Le if is_v(a) && !mentions(b, v) => hi.push((b, 0)),
            BinaryOp::Lt if is_v(a) && !mentions(b, v) => hi.push((b, -1)),
            BinaryOp::Ge if is_v(b) && !mentions(a, v) => hi.push((a, 0)),
            BinaryOp::Gt if is_v(b) && !mentions(a, v) => hi.push((a, -1)),
            _ => {}
        }
    }
    if lo.is_empty() || hi.is_empty() {
        return None;
    }
    Some((lo, hi))
}

impl<'a> TermEval<'a> {
    pub fn eval_bool(&self, t: &Term) -> Result<bool, Stop> {
        boolean(self.eval(t, &mut Vec::new())?)
    }

    pub fn eval_val(&self, t: &Term) -> Result<Val, Stop> {
        self.eval(t, &mut Vec::new())
    }

    fn at(&self, env: &'a Env) -> TermEval<'a> {
        TermEval { env, ..*self }
    }

    fn eval(&self, t: &Term, bound: &mut Vec<(String, BigInt)>) -> Result<Val, Stop> {
        Ok(match t {
            Term::Int(v) => Val::Int(v.clone()),
            Term::Bool(b) => Val::Bool(*b),
            Term::Var(v) => self
                .env
                .get(v)
                .cloned()
                .ok_or_else(|| Stop::runtime(format!("unbound variable {v}")))?,
            Term::Bound(v) => Val::Int(
                bound
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, x)| x.clone())
                    .ok_or_else(|| Stop::runtime(format!("unbound quantifier variable {v}")))?,
            ),
            Term::Not(a) => Val::Bool(!boolean(self.eval(a, bound)?)?),
            Term::Neg(a) => Val::Int(-int(self.eval(a, bound)?)?),
            Term::Wrap32(a) => Val::Int(wrap32(&int(self.eval(a, bound)?)?)),
            Term::Bin(op, a, b) => self.binary(*op, a, b, bound)?,
            Term::Ite(c, a, b) => {
                if boolean(self.eval(c, bound)?)? {
                    self.eval(a, bound)?
                } else {
                    self.eval(b, bound)?
                }
            }
            Term::Select(a, i) => {
                let items = match self.eval(a, bound)? {
                    Val::Array(Some(items)) => items,
                    Val::Array(None) => return Err(Stop::runtime("null array dereference")),
                    other => return Err(Stop::runtime(format!("expected an array, found {other}"))),
                };
                let i = int(self.eval(i, bound)?)?;
                i.to_usize()
                    .and_then(|k| items.get(k).cloned())
                    .map(Val::Int)
                    .ok_or_else(|| Stop::runtime(format!("index {i} out of bounds for length {}", items.len())))?
            }
            Term::Len(a) => match self.eval(a, bound)? {
                Val::Array(Some(items)) => Val::Int(BigInt::from(items.len())),
                Val::Array(None) => Val::Int(BigInt::zero()),
                other => return Err(Stop::runtime(format!("expected an array, found {other}"))),
            },
            Term::IsNull(a) => match self.eval(a, bound)? {
                Val::Array(x) => Val::Bool(x.is_none()),
                other => return Err(Stop::runtime(format!("expected an array, found {other}"))),
            },
            Term::Store(a, i, v) => {
                let Val::Array(Some(mut items)) = self.eval(a, bound)? else {
                    return Err(Stop::runtime("store into a null array"));
                };
                let i = int(self.eval(i, bound)?)?;
                let v = int(self.eval(v, bound)?)?;
                let slot = i
                    .to_usize()
                    .and_then(|k| items.get_mut(k))
                    .ok_or_else(|| Stop::runtime("store out of bounds"))?;
                *slot = v;
                Val::Array(Some(items))
            }
            Term::Old(tag, a) => {
                let env = self
                    .snapshots
                    .get(tag)
                    .ok_or_else(|| Stop::runtime(format!("no snapshot {tag}")))?;
                self.at(env).eval(a, bound)?
            }
            Term::Quant(q, v, body) => Val::Bool(self.quant(*q, v, body, bound)?),
            Term::App(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval(a, bound))
                    .collect::<Result<Vec<_>, _>>()?;
                self.rac.pure_value(f, vals, self.depth + 1, self.direct)?
            }
        })
    }

    fn binary(&self, op: BinaryOp, a: &Term, b: &Term, bound: &mut Vec<(String, BigInt)>) -> Result<Val, Stop> {
        use BinaryOp::*;
        match op {
            And => Ok(Val::Bool(
                boolean(self.eval(a, bound)?)? && boolean(self.eval(b, bound)?)?,
            )),
            Or => Ok(Val::Bool(
                boolean(self.eval(a, bound)?)? || boolean(self.eval(b, bound)?)?,
            )),
            Implies => Ok(Val::Bool(
                !boolean(self.eval(a, bound)?)? || boolean(self.eval(b, bound)?)?,
            )),
            Eq | Ne => {
                let x = self.eval(a, bound)?;
                let y = self.eval(b, bound)?;
                Ok(Val::Bool((x == y) == (op == Eq)))
            }
            _ => {
                let x = int(self.eval(a, bound)?)?;
                let y = int(self.eval(b, bound)?)?;
                Ok(match op {
                    Add => Val::Int(x + y),
                    Sub => Val::Int(x - y),
                    Mul => Val::Int(x * y),
                    Div => Val::Int(jdiv(&x, &y).ok_or_else(|| Stop::runtime("division by zero"))?),
                    Mod => Val::Int(jmod(&x, &y).ok_or_else(|| Stop::runtime("division by zero"))?),
                    Lt => Val::Bool(x < y),
                    Le => Val::Bool(x <= y),
                    Gt => Val::Bool(x > y),
                    Ge => Val::Bool(x >= y),
                    _ => unreachable!(),
                })
            }
        }
    }

    fn quant(&self, q: Quantifier, v: &str, body: &Term, bound: &mut Vec<(String, BigInt)>) -> Result<bool, Stop> {
        if !mentions(body, v) {
            // The domain of ints is non-empty.
            return boolean(self.eval(body, bound)?);
        }
        let Some((lo, hi)) = bound_terms(q, v, body) else {
            return Err(Stop::not_executable(format!(
                "quantifier over `{v}` has no syntactic bounds"
            )));
        };
        let mut low: Option<BigInt> = None;
        for (t, adj) in lo {
            let x = int(self.eval(t, bound)?)? + adj;
            low = Some(low.map_or(x.clone(), |l| l.max(x)));
        }
        let mut high: Option<BigInt> = None;
        for (t, adj) in hi {
            let x = int(self.eval(t, bound)?)? + adj;
            high = Some(high.map_or(x.clone(), |h| h.min(x)));
        }
        let (low, high) = (low.expect("lower"), high.expect("upper"));
        if high >= low && (&high - &low).to_usize().is_none_or(|n| n >= MAX_QUANT_SPAN) {
            return Err(Stop::not_executable(format!(
                "quantifier range over `{v}` is too large"
            )));
        }
        let mut i = low;
        while i <= high {
            bound.push((v.to_string(), i.clone()));
            let r = self.eval(body, bound);
            bound.pop();
            let holds = boolean(r?)?;
            match q {
                Quantifier::Forall if !holds => return Ok(false),
                Quantifier::Exists if holds => return Ok(true),
                _ => {}
            }
            i += 1;
        }
        Ok(q == Quantifier::Forall)
    }
}

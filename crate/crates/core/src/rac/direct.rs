//! Interpreter over the typed AST.
//!
//! Contracts are evaluated where they occur in the source. Checks are
//! identified by kind, span and detail, which locates the matching
//! assertion of the woven body so both interpreters report the same id.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::eval::{Env, TermEval, MAX_QUANT_SPAN};
use super::woven::store;
use super::{default_of, Finished, Rac, Stop, MAX_CALL_DEPTH};
use crate::arith::{in_range, jdiv, jmod, wrap32, ArithmeticMode};
use crate::frontend::ast::{BinaryOp, Quantifier, UnaryOp};
use crate::source::Span;
use crate::typecheck::{Scope, TExpr, TExprKind, TLValue, TMethod, TStmt, TStmtKind, Type, VarRef};
use crate::value::Val;
use crate::weave::{check_detail, AssertKind, AssertionKey, Cmd, GuardedBody, OriginKind, VarRole, PRE};

#[derive(Clone)]
struct State {
    params: HashMap<String, Val>,
    globals: BTreeMap<String, Val>,
    scopes: Vec<HashMap<String, Val>>,
    result: Option<Val>,
}

#[derive(Clone, Default)]
struct ECx<'a> {
    spec: bool,
    detail: String,
    subst: Option<&'a HashMap<String, Val>>,
    result: Option<(Val, bool)>,
    in_old: bool,
    strip_old: bool,
    fn_depth: usize,
}

impl ECx<'_> {
    fn code() -> Self {
        ECx::default()
    }

    fn spec(detail: impl Into<String>) -> Self {
        ECx {
            spec: true,
            detail: detail.into(),
            ..ECx::default()
        }
    }
}

enum Flow {
    Next,
    Return,
}

type Bound = Vec<(String, BigInt)>;

pub(crate) fn run(
    rac: &Rac,
    method: &str,
    args: Vec<Val>,
    globals: &BTreeMap<String, Val>,
    depth: usize,
) -> Result<Finished, Stop> {
    if depth > MAX_CALL_DEPTH {
        return Err(Stop::not_executable(format!("call depth exceeds {MAX_CALL_DEPTH}")));
    }
    let body = rac.body(method)?;
    let m = rac
        .program
        .method(method)
        .ok_or_else(|| Stop::not_executable(format!("unknown method `{method}`")))?;
    let st = State {
        params: m.params.iter().map(|p| p.name.clone()).zip(args).collect(),
        globals: globals.clone(),
        scopes: Vec::new(),
        result: None,
    };
    let mut it = Interp {
        rac,
        m,
        body,
        depth,
        pre: st.clone(),
    };
    it.method(st)
}

struct Interp<'r, 'p> {
    rac: &'r Rac<'p>,
    m: &'p TMethod,
    body: &'r GuardedBody,
    depth: usize,
    pre: State,
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

fn is_null(v: &Val) -> bool {
    matches!(v, Val::Array(None))
}

fn len(v: &Val) -> BigInt {
    match v {
        Val::Array(Some(items)) => BigInt::from(items.len()),
        _ => BigInt::zero(),
    }
}

fn in_bounds(a: &Val, i: &BigInt) -> bool {
    *i >= BigInt::zero() && *i < len(a)
}

fn mentions(e: &TExpr, v: &str) -> bool {
    let mut found = false;
    e.walk(&mut |x| found |= matches!(&x.kind, TExprKind::Var(r) if r.scope == Scope::Bound && r.name == v));
    found
}

fn conjuncts<'e>(e: &'e TExpr, out: &mut Vec<&'e TExpr>) {
    match &e.kind {
        TExprKind::Binary(BinaryOp::And, a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(e),
    }
}

type Bounds<'e> = (Vec<(&'e TExpr, i64)>, Vec<(&'e TExpr, i64)>);

fn bound_exprs<'e>(q: Quantifier, v: &str, body: &'e TExpr) -> Option<Bounds<'e>> {
    let mut ante = Vec::new();
    match (q, &body.kind) {
        (Quantifier::Forall, TExprKind::Binary(BinaryOp::Implies, a, b)) => {
            conjuncts(a, &mut ante);
            let mut rest = &**b;
            while let TExprKind::Binary(BinaryOp::Implies, c, d) = &rest.kind {
                conjuncts(c, &mut ante);
                rest = d;
            }
        }
        (Quantifier::Exists, TExprKind::Binary(BinaryOp::And, ..)) => conjuncts(body, &mut ante),
        _ => return None,
    }
    let is_v = |e: &TExpr| matches!(&e.kind, TExprKind::Var(r) if r.scope == Scope::Bound && r.name == v);
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for c in ante {
        let TExprKind::Binary(op, a, b) = &c.kind else { continue };
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

/// Keep the violation with the smallest ordinal.
fn earliest(a: Option<Stop>, b: Stop) -> Option<Stop> {
    match (&a, &b) {
        (Some(Stop::Violation { id: x, .. }), Stop::Violation { id: y, .. }) if x.ordinal <= y.ordinal => a,
        _ => Some(b),
    }
}

impl Interp<'_, '_> {
    fn fail(&self, kind: AssertKind, span: Span, detail: String) -> Stop {
        let key = AssertionKey { kind, span, detail };
        match self.body.ordinal_of(&key) {
            Some(o) => Stop::Violation {
                id: self.body.assertion_id(o),
                kind,
                span,
            },
            None => Stop::Runtime {
                message: format!("check {} ({}) has no woven counterpart", key.kind, key.detail),
                span: Some(span),
            },
        }
    }

    fn assert(&self, ok: bool, kind: AssertKind, span: Span, detail: impl Into<String>) -> Result<(), Stop> {
        if ok {
            Ok(())
        } else {
            Err(self.fail(kind, span, detail.into()))
        }
    }

    /// A well-definedness or overflow check inside an expression.
    fn check(&self, ok: bool, kind: AssertKind, span: Span, cx: &ECx) -> Result<(), Stop> {
        if ok {
            return Ok(());
        }
        let shown = if cx.spec
            && matches!(
                kind,
                AssertKind::DivZero | AssertKind::NullDeref | AssertKind::IndexBounds
            ) {
            AssertKind::WellDefinedness
        } else {
            kind
        };
        Err(self.fail(shown, span, check_detail(&cx.detail, kind)))
    }

    fn arith(&self, v: BigInt, span: Span, cx: &ECx) -> Result<BigInt, Stop> {
        match self.rac.mode {
            ArithmeticMode::Java => Ok(wrap32(&v)),
            ArithmeticMode::Safe if cx.spec => Ok(v),
            ArithmeticMode::Safe => {
                self.check(in_range(&v), AssertKind::Overflow, span, cx)?;
                Ok(v)
            }
            ArithmeticMode::Bigint => Ok(v),
        }
    }

    fn nullable(&self, e: &TExpr, cx: &ECx) -> bool {
        match &e.kind {
            TExprKind::Var(v) => v.nullable,
            TExprKind::Old(a) => self.nullable(a, cx),
            TExprKind::Result => cx.result.as_ref().is_some_and(|(_, n)| *n),
            _ => false,
        }
    }

    fn lookup(&self, st: &State, v: &VarRef, cx: &ECx, bound: &Bound) -> Result<Val, Stop> {
        let st = if cx.in_old { &self.pre } else { st };
        let found = match v.scope {
            Scope::Bound => bound
                .iter()
                .rev()
                .find(|(n, _)| *n == v.name)
                .map(|(_, x)| Val::Int(x.clone())),
            Scope::Param => match cx.subst.and_then(|s| s.get(&v.name)) {
                Some(x) => Some(x.clone()),
                None => st.params.get(&v.name).cloned(),
            },
            Scope::Global => st.globals.get(&v.name).cloned(),
            Scope::Local => st.scopes.iter().rev().find_map(|s| s.get(&v.name)).cloned(),
        };
        found.ok_or_else(|| Stop::runtime(format!("variable `{}` has no value", v.name)))
    }

    fn ev_bool(&self, st: &State, e: &TExpr, cx: &ECx) -> Result<bool, Stop> {
        boolean(self.ev(st, e, cx, &mut Vec::new())?)
    }

    fn ev(&self, st: &State, e: &TExpr, cx: &ECx, bound: &mut Bound) -> Result<Val, Stop> {
        use AssertKind::*;
        Ok(match &e.kind {
            TExprKind::Int(v) => Val::Int(v.clone()),
            TExprKind::Bool(b) => Val::Bool(*b),
            TExprKind::Var(v) => self.lookup(st, v, cx, bound)?,
            TExprKind::Result => cx
                .result
                .as_ref()
                .map(|(v, _)| v.clone())
                .ok_or_else(|| Stop::runtime("\\result outside a postcondition"))?,
            TExprKind::Unary(UnaryOp::Neg, a) => {
                let x = int(self.ev(st, a, cx, bound)?)?;
                Val::Int(self.arith(-x, e.span, cx)?)
            }
            TExprKind::Unary(UnaryOp::Not, a) => Val::Bool(!boolean(self.ev(st, a, cx, bound)?)?),
            TExprKind::Binary(op, a, b) => {
                let x = self.ev(st, a, cx, bound)?;
                match op {
                    BinaryOp::And => Val::Bool(boolean(x)? && boolean(self.ev(st, b, cx, bound)?)?),
                    BinaryOp::Or => Val::Bool(boolean(x)? || boolean(self.ev(st, b, cx, bound)?)?),
                    BinaryOp::Implies => Val::Bool(!boolean(x)? || boolean(self.ev(st, b, cx, bound)?)?),
                    BinaryOp::Eq => Val::Bool(x == self.ev(st, b, cx, bound)?),
                    BinaryOp::Ne => Val::Bool(x != self.ev(st, b, cx, bound)?),
                    _ => {
                        let x = int(x)?;
                        let y = int(self.ev(st, b, cx, bound)?)?;
                        match op {
                            BinaryOp::Add => Val::Int(self.arith(x + y, e.span, cx)?),
                            BinaryOp::Sub => Val::Int(self.arith(x - y, e.span, cx)?),
                            BinaryOp::Mul => Val::Int(self.arith(x * y, e.span, cx)?),
                            BinaryOp::Div | BinaryOp::Mod => {
                                self.check(!y.is_zero(), DivZero, e.span, cx)?;
                                if *op == BinaryOp::Div {
                                    let q = jdiv(&x, &y).expect("non-zero divisor");
                                    Val::Int(self.arith(q, e.span, cx)?)
                                } else {
                                    let r = jmod(&x, &y).expect("non-zero divisor");
                                    Val::Int(if self.rac.mode == ArithmeticMode::Java {
                                        wrap32(&r)
                                    } else {
                                        r
                                    })
                                }
                            }
                            BinaryOp::Lt => Val::Bool(x < y),
                            BinaryOp::Le => Val::Bool(x <= y),
                            BinaryOp::Gt => Val::Bool(x > y),
                            BinaryOp::Ge => Val::Bool(x >= y),
                            _ => unreachable!("logical operators handled above"),
                        }
                    }
                }
            }
            TExprKind::Index(a, i) => {
                let va = self.ev(st, a, cx, bound)?;
                let vi = int(self.ev(st, i, cx, bound)?)?;
                if self.nullable(a, cx) {
                    self.check(!is_null(&va), NullDeref, e.span, cx)?;
                }
                self.check(in_bounds(&va, &vi), IndexBounds, e.span, cx)?;
                match va {
                    Val::Array(Some(items)) => Val::Int(items[vi.to_usize().expect("checked index")].clone()),
                    _ => return Err(Stop::runtime("null array dereference")),
                }
            }
            TExprKind::IsNull(a) => Val::Bool(is_null(&self.ev(st, a, cx, bound)?)),
            TExprKind::Length(a) => {
                let va = self.ev(st, a, cx, bound)?;
                if self.nullable(a, cx) {
                    self.check(!is_null(&va), NullDeref, e.span, cx)?;
                }
                Val::Int(len(&va))
            }
            TExprKind::Old(a) => {
                if cx.strip_old {
                    self.ev(st, a, cx, bound)?
                } else {
                    let old = ECx {
                        in_old: true,
                        ..cx.clone()
                    };
                    self.ev(st, a, &old, bound)?
                }
            }
            TExprKind::Call(f, args) => self.pure_call(st, f, args, e.span, cx, bound)?,
            TExprKind::Quant(q, v, body) => Val::Bool(self.quant(st, *q, v, body, cx, bound)?),
        })
    }

    fn quant(
        &self,
        st: &State,
        q: Quantifier,
        v: &str,
        body: &TExpr,
        cx: &ECx,
        bound: &mut Bound,
    ) -> Result<bool, Stop> {
        if !mentions(body, v) {
            return boolean(self.ev(st, body, cx, bound)?);
        }
        let Some((lo, hi)) = bound_exprs(q, v, body) else {
            return Err(Stop::not_executable(format!("quantifier over `{v}` has no syntactic bounds")).at(body.span));
        };
        let mut low: Option<BigInt> = None;
        for (e, adj) in lo {
            let x = int(self.ev(st, e, cx, bound)?)? + adj;
            low = Some(low.map_or(x.clone(), |l| l.max(x)));
        }
        let mut high: Option<BigInt> = None;
        for (e, adj) in hi {
            let x = int(self.ev(st, e, cx, bound)?)? + adj;
            high = Some(high.map_or(x.clone(), |h| h.min(x)));
        }
        let (low, high) = (low.expect("lower bound"), high.expect("upper bound"));
        if high >= low && (&high - &low).to_usize().is_none_or(|n| n >= MAX_QUANT_SPAN) {
            return Err(Stop::not_executable(format!("quantifier range over `{v}` is too large")).at(body.span));
        }
        // Every instance is evaluated so that the earliest failing check
        // is reported, as it would be by the woven body.
        let mut failure: Option<Stop> = None;
        let mut value = q == Quantifier::Forall;
        let mut i = low;
        while i <= high {
            self.rac.tick()?;
            bound.push((v.to_string(), i.clone()));
            let r = self.ev(st, body, cx, bound);
            bound.pop();
            match r {
                Ok(x) => {
                    let holds = boolean(x)?;
                    match q {
                        Quantifier::Forall => value &= holds,
                        Quantifier::Exists => value |= holds,
                    }
                }
                Err(s @ Stop::Violation { .. }) => failure = earliest(failure, s),
                Err(other) => return Err(other),
            }
            i += 1;
        }
        match failure {
            Some(s) => Err(s),
            None => Ok(value),
        }
    }

    fn pure_call(
        &self,
        st: &State,
        f: &str,
        args: &[TExpr],
        span: Span,
        cx: &ECx,
        bound: &mut Bound,
    ) -> Result<Val, Stop> {
        let callee = self
            .rac
            .program
            .method(f)
            .ok_or_else(|| Stop::not_executable(format!("unknown method `{f}`")))?;
        let mut vals = Vec::new();
        for a in args {
            vals.push(self.ev(st, a, cx, bound)?);
        }
        if cx.fn_depth < crate::weave::MAX_FN_DEPTH {
            let subst: HashMap<String, Val> = callee
                .params
                .iter()
                .map(|p| p.name.clone())
                .zip(vals.iter().cloned())
                .collect();
            for (j, req) in callee.requires.iter().enumerate() {
                let pcx = ECx {
                    spec: true,
                    detail: format!("{}|fnpre@{span}", cx.detail),
                    subst: Some(&subst),
                    result: None,
                    in_old: cx.in_old,
                    strip_old: true,
                    fn_depth: cx.fn_depth + 1,
                };
                let ok = boolean(self.ev(st, req, &pcx, bound)?)?;
                self.assert(
                    ok,
                    AssertKind::WellDefinedness,
                    span,
                    format!("{}|fnpre#{j}", cx.detail),
                )?;
            }
        }
        let globals = if cx.in_old { &self.pre.globals } else { &st.globals };
        for g in &self.rac.program.globals {
            vals.push(
                globals
                    .get(&g.name)
                    .cloned()
                    .ok_or_else(|| Stop::runtime(format!("global `{}` has no value", g.name)))?,
            );
        }
        self.rac.pure_value(f, vals, self.depth + 1, true)
    }

    fn assign(&self, st: &mut State, v: &VarRef, val: Val) {
        match v.scope {
            Scope::Param => {
                st.params.insert(v.name.clone(), val);
            }
            Scope::Global => {
                st.globals.insert(v.name.clone(), val);
            }
            _ => {
                if let Some(s) = st.scopes.iter_mut().rev().find(|s| s.contains_key(&v.name)) {
                    s.insert(v.name.clone(), val);
                }
            }
        }
    }

    fn store(&self, st: &mut State, v: &VarRef, i: BigInt, x: Val) -> Result<(), Stop> {
        let mut env = Env::new();
        let cur = self.lookup(st, v, &ECx::code(), &Vec::new())?;
        env.insert(v.name.clone(), cur);
        store(&mut env, &v.name, Val::Int(i), x)?;
        self.assign(st, v, env.remove(&v.name).expect("stored"));
        Ok(())
    }

    fn elem_checks(&self, st: &State, v: &VarRef, i: &BigInt, span: Span) -> Result<(), Stop> {
        let a = self.lookup(st, v, &ECx::code(), &Vec::new())?;
        if v.nullable {
            self.assert(
                !is_null(&a),
                AssertKind::NullDeref,
                span,
                check_detail("store", AssertKind::NullDeref),
            )?;
        }
        self.assert(
            in_bounds(&a, i),
            AssertKind::IndexBounds,
            span,
            check_detail("store", AssertKind::IndexBounds),
        )
    }

    fn method(&mut self, mut st: State) -> Result<Finished, Stop> {
        let m = self.m;
        let program = self.rac.program;
        for fact in &m.implicit_nonnull {
            if st.params.get(&fact.var).is_some_and(is_null) {
                return Err(Stop::NotApplicable);
            }
        }
        for fact in &program.implicit_global_nonnull {
            if st.globals.get(&fact.var).is_some_and(is_null) {
                return Err(Stop::NotApplicable);
            }
        }
        if self.rac.mode.bounded() {
            let all_in_range = st.params.values().chain(st.globals.values()).all(|v| match v {
                Val::Int(x) => in_range(x),
                Val::Array(Some(items)) => items.iter().all(in_range),
                _ => true,
            });
            if !all_in_range {
                return Err(Stop::NotApplicable);
            }
        }
        for inv in &program.invariants {
            if !self.ev_bool(&st, &inv.expr, &ECx::spec("ginv-entry"))? {
                return Err(Stop::NotApplicable);
            }
        }
        for req in &m.requires {
            if !self.ev_bool(&st, req, &ECx::spec("requires"))? {
                return Err(Stop::NotApplicable);
            }
        }
        let body = m
            .body
            .as_ref()
            .ok_or_else(|| Stop::not_executable(format!("method `{}` has no body", m.name)))?;
        self.stmts(&mut st, body)?;

        let result_nullable = m.ret.is_some_and(|(_, n)| n);
        let result = match m.ret {
            Some((ty, _)) => Some(
                st.result
                    .clone()
                    .unwrap_or_else(|| default_of(crate::weave::sort_of(ty))),
            ),
            None => None,
        };
        for ens in &m.ensures {
            let cx = ECx {
                result: result.clone().map(|r| (r, result_nullable)),
                ..ECx::spec("ensures")
            };
            let ok = self.ev_bool(&st, ens, &cx)?;
            self.assert(ok, AssertKind::Postcondition, ens.span, "ensures")?;
        }
        if let (Some((Type::IntArray, false)), Some(r)) = (m.ret, &result) {
            self.assert(!is_null(r), AssertKind::Postcondition, m.name_span, "result-nonnull")?;
        }
        for inv in &program.invariants {
            let ok = self.ev_bool(&st, &inv.expr, &ECx::spec("ginv-exit"))?;
            self.assert(ok, AssertKind::GlobalInvariant, inv.span, "exit")?;
        }
        self.frame(&st, result.clone())?;
        Ok(Finished {
            result,
            params: m.params.iter().map(|p| st.params[&p.name].clone()).collect(),
            globals: st.globals,
        })
    }

    /// The frame conditions are evaluated from the woven exit section over
    /// the current and entry states.
    fn frame(&self, st: &State, result: Option<Val>) -> Result<(), Stop> {
        let env_of = |s: &State| -> Env {
            self.body
                .vars
                .iter()
                .map(|v| {
                    let x = match v.role {
                        VarRole::Param => s.params.get(&v.source).cloned(),
                        VarRole::Global => s.globals.get(&v.source).cloned(),
                        VarRole::Result => result.clone(),
                        _ => None,
                    };
                    (v.name.clone(), x.unwrap_or_else(|| default_of(v.sort)))
                })
                .collect()
        };
        let env = env_of(st);
        let snapshots = HashMap::from([(PRE.to_string(), env_of(&self.pre))]);
        let te = TermEval {
            rac: self.rac,
            env: &env,
            snapshots: &snapshots,
            depth: self.depth,
            direct: true,
        };
        for c in &self.body.exit {
            if let Cmd::Assert { term, id, origin } = c {
                if origin.kind == OriginKind::Frame && !te.eval_bool(term)? {
                    let info = &self.body.assertions[*id];
                    return Err(Stop::Violation {
                        id: self.body.assertion_id(*id),
                        kind: info.kind,
                        span: info.span,
                    });
                }
            }
        }
        Ok(())
    }

    fn stmts(&self, st: &mut State, ss: &[TStmt]) -> Result<Flow, Stop> {
        st.scopes.push(HashMap::new());
        let mut flow = Flow::Next;
        for s in ss {
            self.rac.tick()?;
            match self.stmt(st, s).map_err(|e| e.at(s.span)) {
                Ok(Flow::Next) => {}
                Ok(Flow::Return) => {
                    flow = Flow::Return;
                    break;
                }
                Err(e) => {
                    st.scopes.pop();
                    return Err(e);
                }
            }
        }
        st.scopes.pop();
        Ok(flow)
    }

    fn stmt(&self, st: &mut State, s: &TStmt) -> Result<Flow, Stop> {
        let code = ECx::code();
        match &s.kind {
            TStmtKind::VarDecl { var, init } => {
                let val = match init {
                    Some(e) => {
                        let x = self.ev(st, e, &code, &mut Vec::new())?;
                        if var.ty == Type::IntArray && !var.nullable && self.nullable(e, &code) {
                            self.assert(!is_null(&x), AssertKind::NullDeref, s.span, "assign-nonnull")?;
                        }
                        x
                    }
                    None => default_of(crate::weave::sort_of(var.ty)),
                };
                st.scopes.last_mut().expect("scope").insert(var.name.clone(), val);
            }
            TStmtKind::Assign {
                target: TLValue::Var(v, _),
                value,
            } => {
                let x = self.ev(st, value, &code, &mut Vec::new())?;
                if v.ty == Type::IntArray && !v.nullable && self.nullable(value, &code) {
                    self.assert(!is_null(&x), AssertKind::NullDeref, s.span, "assign-nonnull")?;
                }
                self.assign(st, v, x);
            }
            TStmtKind::Assign {
                target: TLValue::Index(v, _, idx),
                value,
            } => {
                let i = int(self.ev(st, idx, &code, &mut Vec::new())?)?;
                let x = self.ev(st, value, &code, &mut Vec::new())?;
                self.elem_checks(st, v, &i, s.span)?;
                self.store(st, v, i, x)?;
            }
            TStmtKind::Call { target, callee, args } => self.call(st, s, target.as_ref(), callee, args)?,
            TStmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let c = self.ev_bool(st, cond, &code)?;
                return self.stmts(st, if c { then_branch } else { else_branch });
            }
            TStmtKind::While {
                cond,
                invariants,
                decreases,
                body,
            } => {
                for inv in invariants {
                    let ok = self.ev_bool(st, inv, &ECx::spec("inv-entry"))?;
                    self.assert(ok, AssertKind::LoopInvEntry, inv.span, "inv-entry")?;
                }
                loop {
                    self.rac.tick()?;
                    let d0 = match decreases {
                        Some(d) => Some(int(self.ev(st, d, &ECx::spec("dec-entry"), &mut Vec::new())?)?),
                        None => None,
                    };
                    if !self.ev_bool(st, cond, &code)? {
                        break;
                    }
                    if let Flow::Return = self.stmts(st, body)? {
                        return Ok(Flow::Return);
                    }
                    for inv in invariants {
                        let ok = self.ev_bool(st, inv, &ECx::spec("inv-preserved"))?;
                        self.assert(ok, AssertKind::LoopInvPreserved, inv.span, "inv-preserved")?;
                    }
                    if let (Some(d), Some(d0)) = (decreases, d0) {
                        let x = int(self.ev(st, d, &ECx::spec("dec"), &mut Vec::new())?)?;
                        self.assert(x >= BigInt::zero(), AssertKind::DecreasesBound, d.span, "bound")?;
                        self.assert(x < d0, AssertKind::DecreasesDecrease, d.span, "decrease")?;
                    }
                }
            }
            TStmtKind::Return(value) => {
                if let Some(e) = value {
                    st.result = Some(self.ev(st, e, &code, &mut Vec::new())?);
                }
                return Ok(Flow::Return);
            }
            TStmtKind::Assert(e) => {
                let ok = self.ev_bool(st, e, &ECx::spec("assert"))?;
                self.assert(ok, AssertKind::ExplicitAssert, e.span, "assert")?;
            }
            TStmtKind::Assume(e) => {
                if !self.ev_bool(st, e, &ECx::spec("assume"))? {
                    return Err(Stop::NotApplicable);
                }
            }
            TStmtKind::Block(b) => return self.stmts(st, b),
        }
        Ok(Flow::Next)
    }

    fn call(
        &self,
        st: &mut State,
        s: &TStmt,
        target: Option<&TLValue>,
        name: &str,
        args: &[TExpr],
    ) -> Result<(), Stop> {
        let program = self.rac.program;
        let callee = program
            .method(name)
            .ok_or_else(|| Stop::not_executable(format!("unknown method `{name}`")))?;
        let code = ECx::code();
        let mut vals = Vec::new();
        let mut arrays = Vec::new();
        for (j, (arg, param)) in args.iter().zip(&callee.params).enumerate() {
            if param.ty == Type::IntArray {
                let TExprKind::Var(v) = &arg.kind else {
                    return Err(Stop::not_executable("array arguments must be variables"));
                };
                vals.push(self.lookup(st, v, &code, &Vec::new())?);
                arrays.push((j, arg, v, param.nullable));
            } else {
                vals.push(self.ev(st, arg, &code, &mut Vec::new())?);
            }
        }
        for (j, arg, v, param_nullable) in &arrays {
            if v.nullable && !param_nullable {
                self.assert(!is_null(&vals[*j]), AssertKind::CallPre, arg.span, "arg-nonnull")?;
            }
        }
        let subst: HashMap<String, Val> = callee
            .params
            .iter()
            .map(|p| p.name.clone())
            .zip(vals.iter().cloned())
            .collect();
        let pre_cx = ECx {
            subst: Some(&subst),
            ..ECx::spec(format!("callpre@{}", s.span))
        };
        for (j, req) in callee.requires.iter().enumerate() {
            let ok = self.ev_bool(st, req, &pre_cx)?;
            self.assert(ok, AssertKind::CallPre, s.span, format!("pre#{j}"))?;
        }
        for inv in &program.invariants {
            let ok = self.ev_bool(st, &inv.expr, &ECx::spec(format!("ginv-call@{}", s.span)))?;
            self.assert(ok, AssertKind::GlobalInvariant, inv.span, format!("call@{}", s.span))?;
        }
        let out = run(self.rac, name, vals, &st.globals, self.depth + 1).map_err(|e| e.in_call(name))?;
        for (j, _, v, _) in &arrays {
            self.assign(st, v, out.params[*j].clone());
        }
        st.globals = out.globals;
        match (target, out.result) {
            (Some(TLValue::Var(v, _)), Some(r)) => {
                if v.ty == Type::IntArray && !v.nullable && callee.ret.is_some_and(|(_, n)| n) {
                    self.assert(!is_null(&r), AssertKind::NullDeref, s.span, "assign-nonnull")?;
                }
                self.assign(st, v, r);
            }
            (Some(TLValue::Index(v, _, idx)), Some(r)) => {
                let i = int(self.ev(st, idx, &code, &mut Vec::new())?)?;
                self.elem_checks(st, v, &i, s.span)?;
                self.store(st, v, i, r)?;
            }
            _ => {}
        }
        Ok(())
    }
}

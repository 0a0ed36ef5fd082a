//! Contract weaving: typed methods to guarded commands.

pub mod body;
pub mod print;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub use body::*;

use crate::arith::{ArithmeticMode, MAX32};
use crate::frontend::ast::{BinaryOp, UnaryOp};
use crate::ir::{Sort, Term};
use crate::source::Span;
use crate::typecheck::*;

/// Nesting limit for pure-method contracts instantiated inside other
/// contracts.
pub const MAX_FN_DEPTH: usize = 1;

/// Tag of the snapshot taken at method entry.
pub const PRE: &str = "pre";

pub const RESULT: &str = "$result";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{span}: {message}")]
pub struct WeaveError {
    pub span: Span,
    pub message: String,
}

/// Detail string identifying a partial-operation check within a clause
/// context. Shared with the direct interpreter.
pub fn check_detail(ctx: &str, kind: AssertKind) -> String {
    format!("{ctx}:{}", kind.as_str())
}

pub fn sort_of(t: Type) -> Sort {
    match t {
        Type::Int => Sort::Int,
        Type::Bool => Sort::Bool,
        Type::IntArray => Sort::Array,
    }
}

#[derive(Clone)]
enum CtxItem {
    Cond(Term),
    Bind(String),
}

/// Short-circuit and quantifier context of the sub-expression being
/// translated.
#[derive(Default)]
struct Guards {
    items: Vec<CtxItem>,
    in_old: Option<String>,
}

fn bound_vars(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    t.walk(&mut |x| {
        if let Term::Bound(v) = x {
            out.insert(v.clone());
        }
    });
    out
}

impl Guards {
    /// Close a guard over its context. Binders the guard does not depend on
    /// are dropped together with the conditions that only constrain them,
    /// so a guard on a range bound such as `a.length` is checked once
    /// rather than under a quantifier with no bounds.
    fn wrap(&self, t: Term) -> Term {
        let mut t = match &self.in_old {
            Some(tag) => Term::old(tag, t),
            None => t,
        };
        let binders: BTreeSet<String> = self
            .items
            .iter()
            .filter_map(|i| match i {
                CtxItem::Bind(v) => Some(v.clone()),
                CtxItem::Cond(_) => None,
            })
            .collect();
        let mut live: BTreeSet<String> = bound_vars(&t).intersection(&binders).cloned().collect();
        loop {
            let before = live.len();
            for item in &self.items {
                if let CtxItem::Cond(c) = item {
                    let vs = bound_vars(c);
                    if vs.iter().any(|v| live.contains(v)) {
                        live.extend(vs.intersection(&binders).cloned());
                    }
                }
            }
            if live.len() == before {
                break;
            }
        }
        for item in self.items.iter().rev() {
            t = match item {
                CtxItem::Cond(c) if bound_vars(c).iter().all(|v| live.contains(v) || !binders.contains(v)) => {
                    Term::implies(c.clone(), t)
                }
                CtxItem::Bind(v) if live.contains(v) => Term::forall(v, t),
                _ => t,
            };
        }
        t
    }

    fn push_cond(&mut self, c: Term) {
        let c = match &self.in_old {
            Some(tag) => Term::old(tag, c),
            None => c,
        };
        self.items.push(CtxItem::Cond(c));
    }
}

#[derive(Clone)]
struct Cx<'a> {
    spec: bool,
    detail: String,
    subst: Option<&'a HashMap<String, Term>>,
    result: Option<(Term, bool)>,
    /// `None` strips `old` (pure-method contracts).
    old_tag: Option<String>,
    silent: bool,
    origin: Origin,
    fn_depth: usize,
}

impl<'a> Cx<'a> {
    fn code(origin: Origin) -> Self {
        Cx {
            spec: false,
            detail: String::new(),
            subst: None,
            result: None,
            old_tag: Some(PRE.into()),
            silent: false,
            origin,
            fn_depth: 0,
        }
    }

    fn spec(detail: impl Into<String>, origin: Origin) -> Self {
        Cx {
            spec: true,
            detail: detail.into(),
            ..Cx::code(origin)
        }
    }
}

#[derive(Default)]
struct Cover {
    whole: bool,
    all_elements: bool,
    ranges: Vec<(Term, Term)>,
}

struct Weaver<'p> {
    program: &'p TypedProgram,
    method: &'p TMethod,
    mode: ArithmeticMode,
    vars: Vec<VarInfo>,
    assertions: Vec<AssertionInfo>,
    calls: Vec<CallSite>,
    loops: usize,
    params: HashMap<String, String>,
    globals: HashMap<String, String>,
    scopes: Vec<HashMap<String, String>>,
}

type WResult<T> = Result<T, WeaveError>;

impl<'p> Weaver<'p> {
    fn new(program: &'p TypedProgram, method: &'p TMethod, mode: ArithmeticMode) -> Self {
        let mut w = Weaver {
            program,
            method,
            mode,
            vars: Vec::new(),
            assertions: Vec::new(),
            calls: Vec::new(),
            loops: 0,
            params: HashMap::new(),
            globals: HashMap::new(),
            scopes: Vec::new(),
        };
        for p in &method.params {
            let n = w.register(&p.name, sort_of(p.ty), VarRole::Param, p.nullable);
            w.params.insert(p.name.clone(), n);
        }
        for g in &program.globals {
            let n = w.register(&g.name, sort_of(g.ty), VarRole::Global, g.nullable);
            w.globals.insert(g.name.clone(), n);
        }
        if let Some((ty, nullable)) = method.ret {
            w.register(RESULT, sort_of(ty), VarRole::Result, nullable);
        }
        w
    }

    fn register(&mut self, source: &str, sort: Sort, role: VarRole, nullable: bool) -> String {
        let mut name = source.to_string();
        let mut n = 1;
        while self.vars.iter().any(|v| v.name == name) {
            name = format!("{source}${n}");
            n += 1;
        }
        self.vars.push(VarInfo {
            name: name.clone(),
            source: source.into(),
            sort,
            role,
            nullable,
        });
        name
    }

    fn temp(&mut self, name: String, sort: Sort, nullable: bool) -> String {
        self.register(&name, sort, VarRole::Temp, nullable)
    }

    fn name_of(&self, v: &VarRef) -> String {
        match v.scope {
            Scope::Param => self.params[&v.name].clone(),
            Scope::Global => self.globals[&v.name].clone(),
            Scope::Local => self
                .scopes
                .iter()
                .rev()
                .find_map(|s| s.get(&v.name))
                .cloned()
                .unwrap_or_else(|| panic!("local `{}` not in scope", v.name)),
            Scope::Bound => v.name.clone(),
        }
    }

    fn var_is_nullable(&self, name: &str) -> bool {
        self.vars.iter().find(|v| v.name == name).is_some_and(|v| v.nullable)
    }

    fn assert_cmd(
        &mut self,
        term: Term,
        kind: AssertKind,
        span: Span,
        detail: String,
        origin: Origin,
        out: &mut Vec<Cmd>,
    ) {
        let ordinal = self.assertions.len();
        debug_assert!(
            !self
                .assertions
                .iter()
                .any(|a| a.kind == kind && a.span == span && a.detail == detail),
            "duplicate assertion key {kind} {span} {detail}"
        );
        self.assertions.push(AssertionInfo {
            ordinal,
            kind,
            span,
            detail,
        });
        out.push(Cmd::Assert {
            term,
            id: ordinal,
            origin,
        });
    }

    fn guard(&mut self, g: Term, kind: AssertKind, span: Span, cx: &Cx, gs: &Guards, out: &mut Vec<Cmd>) {
        if cx.silent {
            return;
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
        let term = gs.wrap(g);
        self.assert_cmd(term, shown, span, check_detail(&cx.detail, kind), cx.origin, out);
    }

    fn arith(&mut self, t: Term, span: Span, cx: &Cx, gs: &Guards, out: &mut Vec<Cmd>) -> Term {
        match self.mode {
            ArithmeticMode::Java => Term::Wrap32(Box::new(t)),
            // Specifications use unbounded arithmetic in safe mode.
            ArithmeticMode::Safe if cx.spec => t,
            ArithmeticMode::Safe => {
                self.guard(Term::in_range(t.clone()), AssertKind::Overflow, span, cx, gs, out);
                t
            }
            ArithmeticMode::Bigint => t,
        }
    }

    fn expr_nullable(&self, e: &TExpr, cx: &Cx) -> bool {
        match &e.kind {
            TExprKind::Var(v) => v.nullable,
            TExprKind::Old(a) => self.expr_nullable(a, cx),
            TExprKind::Result => cx.result.as_ref().is_some_and(|(_, n)| *n),
            _ => false,
        }
    }

    fn var_term(&self, v: &VarRef, cx: &Cx) -> Term {
        if v.scope == Scope::Bound {
            return Term::Bound(v.name.clone());
        }
        if v.scope == Scope::Param {
            if let Some(t) = cx.subst.and_then(|s| s.get(&v.name)) {
                return t.clone();
            }
        }
        Term::Var(self.name_of(v))
    }

    fn tr(&mut self, e: &TExpr, cx: &Cx, gs: &mut Guards, out: &mut Vec<Cmd>) -> WResult<Term> {
        use AssertKind::*;
        Ok(match &e.kind {
            TExprKind::Int(v) => Term::Int(v.clone()),
            TExprKind::Bool(b) => Term::Bool(*b),
            TExprKind::Var(v) => self.var_term(v, cx),
            TExprKind::Result => cx.result.as_ref().map(|(t, _)| t.clone()).ok_or_else(|| WeaveError {
                span: e.span,
                message: "\\result outside a postcondition".into(),
            })?,
            TExprKind::Unary(UnaryOp::Neg, a) => {
                let ta = self.tr(a, cx, gs, out)?;
                self.arith(Term::Neg(Box::new(ta)), e.span, cx, gs, out)
            }
            TExprKind::Unary(UnaryOp::Not, a) => Term::Not(Box::new(self.tr(a, cx, gs, out)?)),
            TExprKind::Binary(op, a, b) => {
                let ta = self.tr(a, cx, gs, out)?;
                match op {
                    BinaryOp::And | BinaryOp::Or | BinaryOp::Implies => {
                        let c = if *op == BinaryOp::Or {
                            Term::Not(Box::new(ta.clone()))
                        } else {
                            ta.clone()
                        };
                        gs.push_cond(c);
                        let tb = self.tr(b, cx, gs, out);
                        gs.items.pop();
                        Term::bin(*op, ta, tb?)
                    }
                    BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul => {
                        let tb = self.tr(b, cx, gs, out)?;
                        self.arith(Term::bin(*op, ta, tb), e.span, cx, gs, out)
                    }
                    BinaryOp::Div | BinaryOp::Mod => {
                        let tb = self.tr(b, cx, gs, out)?;
                        self.guard(
                            Term::not(Term::eq(tb.clone(), Term::int(0))),
                            DivZero,
                            e.span,
                            cx,
                            gs,
                            out,
                        );
                        let t = Term::bin(*op, ta, tb);
                        match (op, self.mode) {
                            (BinaryOp::Div, _) => self.arith(t, e.span, cx, gs, out),
                            (_, ArithmeticMode::Java) => Term::Wrap32(Box::new(t)),
                            _ => t,
                        }
                    }
                    _ => {
                        let tb = self.tr(b, cx, gs, out)?;
                        Term::bin(*op, ta, tb)
                    }
                }
            }
            TExprKind::Index(a, i) => {
                let ta = self.tr(a, cx, gs, out)?;
                let ti = self.tr(i, cx, gs, out)?;
                if self.expr_nullable(a, cx) {
                    self.guard(Term::not(Term::is_null(ta.clone())), NullDeref, e.span, cx, gs, out);
                }
                let bounds = Term::and(
                    Term::le(Term::int(0), ti.clone()),
                    Term::lt(ti.clone(), Term::len(ta.clone())),
                );
                self.guard(bounds, IndexBounds, e.span, cx, gs, out);
                Term::select(ta, ti)
            }
            TExprKind::IsNull(a) => Term::is_null(self.tr(a, cx, gs, out)?),
            TExprKind::Length(a) => {
                let ta = self.tr(a, cx, gs, out)?;
                if self.expr_nullable(a, cx) {
                    self.guard(Term::not(Term::is_null(ta.clone())), NullDeref, e.span, cx, gs, out);
                }
                Term::len(ta)
            }
            TExprKind::Old(a) => match cx.old_tag.clone() {
                None => self.tr(a, cx, gs, out)?,
                Some(tag) => {
                    let prev = gs.in_old.replace(tag.clone());
                    let t = self.tr(a, cx, gs, out);
                    gs.in_old = prev;
                    Term::old(&tag, t?)
                }
            },
            TExprKind::Call(f, args) => self.pure_call(f, args, e.span, cx, gs, out)?,
            TExprKind::Quant(q, v, body) => {
                gs.items.push(CtxItem::Bind(v.clone()));
                let tb = self.tr(body, cx, gs, out);
                gs.items.pop();
                Term::Quant(*q, v.clone(), Box::new(tb?))
            }
        })
    }

    fn global_args(&self) -> Vec<Term> {
        self.program
            .globals
            .iter()
            .map(|g| Term::Var(self.globals[&g.name].clone()))
            .collect()
    }

    fn pure_call(
        &mut self,
        f: &str,
        args: &[TExpr],
        span: Span,
        cx: &Cx,
        gs: &mut Guards,
        out: &mut Vec<Cmd>,
    ) -> WResult<Term> {
        let program = self.program;
        let callee = program.method(f).ok_or_else(|| WeaveError {
            span,
            message: format!("unknown method `{f}`"),
        })?;
        if matches!(callee.ret, Some((Type::IntArray, _)) | None) {
            return Err(WeaveError {
                span,
                message: format!("method `{f}` must return int or bool to be used in a specification"),
            });
        }
        let mut targs = Vec::new();
        for a in args {
            targs.push(self.tr(a, cx, gs, out)?);
        }
        let subst: HashMap<String, Term> = callee
            .params
            .iter()
            .map(|p| p.name.clone())
            .zip(targs.iter().cloned())
            .collect();
        let mut app_args = targs.clone();
        app_args.extend(self.global_args());
        let app = Term::App(f.to_string(), app_args);
        if cx.fn_depth >= MAX_FN_DEPTH {
            return Ok(app);
        }
        let inner = Cx {
            spec: true,
            subst: Some(&subst),
            result: None,
            old_tag: None,
            fn_depth: cx.fn_depth + 1,
            ..cx.clone()
        };
        if !cx.silent {
            for (j, req) in callee.requires.iter().enumerate() {
                let pcx = Cx {
                    detail: format!("{}|fnpre@{span}", cx.detail),
                    ..inner.clone()
                };
                let t = self.tr(req, &pcx, gs, out)?;
                let term = gs.wrap(t);
                self.assert_cmd(
                    term,
                    AssertKind::WellDefinedness,
                    span,
                    format!("{}|fnpre#{j}", cx.detail),
                    cx.origin,
                    out,
                );
            }
        }
        let silent = Cx { silent: true, ..inner };
        let mut pre = Vec::new();
        for req in &callee.requires {
            pre.push(self.tr(req, &silent, gs, out)?);
        }
        let post_cx = Cx {
            result: Some((app.clone(), false)),
            ..silent
        };
        let mut post = Vec::new();
        for ens in &callee.ensures {
            post.push(self.tr(ens, &post_cx, gs, out)?);
        }
        if !post.is_empty() {
            let axiom = Term::implies(Term::and_all(pre), Term::and_all(post));
            out.push(Cmd::Assume {
                term: gs.wrap(axiom),
                role: AssumeRole::Axiom,
                origin: cx.origin,
            });
        }
        Ok(app)
    }

    fn tr_top(&mut self, e: &TExpr, cx: &Cx, out: &mut Vec<Cmd>) -> WResult<Term> {
        let mut gs = Guards::default();
        self.tr(e, cx, &mut gs, out)
    }

    fn range_assumes(&mut self, names: &[(String, bool)], origin: Origin, out: &mut Vec<Cmd>) {
        for (name, whole) in names {
            let Some(info) = self.vars.iter().find(|v| &v.name == name).cloned() else {
                continue;
            };
            let v = Term::var(name.clone());
            if info.sort == Sort::Array && *whole && !info.nullable {
                out.push(Cmd::Assume {
                    term: Term::not(Term::is_null(v.clone())),
                    role: AssumeRole::NonNull,
                    origin,
                });
            }
            if !self.mode.bounded() {
                continue;
            }
            let term = match info.sort {
                Sort::Int => Term::in_range(v),
                Sort::Array => array_elements_in_range(v),
                Sort::Bool => continue,
            };
            out.push(Cmd::Assume {
                term,
                role: AssumeRole::Range,
                origin,
            });
        }
    }

    fn entry(&mut self, out: &mut Vec<Cmd>) -> WResult<()> {
        let m = self.method;
        let origin = Origin::new(m.name_span, OriginKind::Entry);
        out.push(Cmd::Snapshot { tag: PRE.into() });
        for fact in &m.implicit_nonnull {
            let v = Term::var(self.params[&fact.var].clone());
            out.push(Cmd::Assume {
                term: Term::not(Term::is_null(v)),
                role: AssumeRole::NonNull,
                origin,
            });
        }
        for fact in &self.program.implicit_global_nonnull {
            let v = Term::var(self.globals[&fact.var].clone());
            out.push(Cmd::Assume {
                term: Term::not(Term::is_null(v)),
                role: AssumeRole::NonNull,
                origin,
            });
        }
        let inputs: Vec<(String, bool)> = m
            .params
            .iter()
            .map(|p| self.params[&p.name].clone())
            .chain(self.program.globals.iter().map(|g| self.globals[&g.name].clone()))
            .map(|n| (n, false))
            .collect();
        self.range_assumes(&inputs, origin, out);
        for inv in &self.program.invariants {
            let o = Origin::new(inv.span, OriginKind::Invariant);
            let t = self.tr_top(&inv.expr, &Cx::spec("ginv-entry", o), out)?;
            out.push(Cmd::Assume {
                term: t,
                role: AssumeRole::Invariant,
                origin: o,
            });
        }
        for req in &m.requires {
            let o = Origin::new(req.span, OriginKind::Requires);
            let t = self.tr_top(req, &Cx::spec("requires", o), out)?;
            out.push(Cmd::Assume {
                term: t,
                role: AssumeRole::Requires,
                origin: o,
            });
        }
        Ok(())
    }

    fn exit(&mut self, out: &mut Vec<Cmd>) -> WResult<()> {
        let m = self.method;
        let result = m.ret.map(|(_, n)| (Term::var(RESULT), n));
        for ens in &m.ensures {
            let o = Origin::new(ens.span, OriginKind::Ensures);
            let cx = Cx {
                result: result.clone(),
                ..Cx::spec("ensures", o)
            };
            let t = self.tr_top(ens, &cx, out)?;
            self.assert_cmd(t, AssertKind::Postcondition, ens.span, "ensures".into(), o, out);
        }
        if let Some((Type::IntArray, false)) = m.ret {
            let o = Origin::new(m.name_span, OriginKind::Exit);
            let t = Term::not(Term::is_null(Term::var(RESULT)));
            self.assert_cmd(
                t,
                AssertKind::Postcondition,
                m.name_span,
                "result-nonnull".into(),
                o,
                out,
            );
        }
        for inv in &self.program.invariants {
            let o = Origin::new(inv.span, OriginKind::Invariant);
            let t = self.tr_top(&inv.expr, &Cx::spec("ginv-exit", o), out)?;
            self.assert_cmd(t, AssertKind::GlobalInvariant, inv.span, "exit".into(), o, out);
        }
        let o = Origin::new(m.name_span, OriginKind::Frame);
        let cx = Cx::spec("", o);
        for (name, term) in self.frame_conjuncts(m, PRE, &cx, out)? {
            self.assert_cmd(term, AssertKind::Frame, m.name_span, format!("frame:{name}"), o, out);
        }
        Ok(())
    }

    /// Frame postcondition conjuncts of `m`, one per mutable location not
    /// fully covered by its assignable clause.
    fn frame_conjuncts(&mut self, m: &TMethod, tag: &str, cx: &Cx, out: &mut Vec<Cmd>) -> WResult<Vec<(String, Term)>> {
        let default = if m.pure {
            vec![TStoreRef::Nothing(m.name_span)]
        } else {
            vec![TStoreRef::Everything(m.name_span)]
        };
        let refs = m.assignable.as_ref().unwrap_or(&default);
        let mut cover: HashMap<(bool, String), Cover> = HashMap::new();
        for r in refs {
            match r {
                TStoreRef::Everything(_) => return Ok(Vec::new()),
                TStoreRef::Nothing(_) => {}
                TStoreRef::Name(v, span) => {
                    if v.scope == Scope::Param {
                        return Err(WeaveError {
                            span: *span,
                            message: format!(
                                "`{}` is a parameter and cannot be assigned; use `{}[*]` for array elements",
                                v.name, v.name
                            ),
                        });
                    }
                    cover.entry((false, v.name.clone())).or_default().whole = true;
                }
                TStoreRef::AllElements(v, _) => {
                    cover
                        .entry((v.scope == Scope::Param, v.name.clone()))
                        .or_default()
                        .all_elements = true
                }
                TStoreRef::Range(v, lo, hi, _) => {
                    let rcx = Cx {
                        detail: format!("{}frame", cx.detail),
                        old_tag: Some(tag.into()),
                        ..cx.clone()
                    };
                    let mut gs = Guards {
                        items: Vec::new(),
                        in_old: Some(tag.into()),
                    };
                    let tlo = self.tr(lo, &rcx, &mut gs, out)?;
                    let thi = self.tr(hi, &rcx, &mut gs, out)?;
                    cover
                        .entry((v.scope == Scope::Param, v.name.clone()))
                        .or_default()
                        .ranges
                        .push((Term::old(tag, tlo), Term::old(tag, thi)));
                }
            }
        }
        let mut items = Vec::new();
        for g in &self.program.globals {
            let c = cover.remove(&(false, g.name.clone())).unwrap_or_default();
            let v = Term::var(self.globals[&g.name].clone());
            if let Some(t) = frame_term(v, g.ty, &c, tag) {
                items.push((g.name.clone(), t));
            }
        }
        for p in m.params.iter().filter(|p| p.ty == Type::IntArray) {
            let c = cover.remove(&(true, p.name.clone())).unwrap_or_default();
            let v = match cx.subst.and_then(|s| s.get(&p.name)) {
                Some(t) => t.clone(),
                None => Term::var(self.params[&p.name].clone()),
            };
            if let Some(t) = frame_term(v, p.ty, &c, tag) {
                items.push((p.name.clone(), t));
            }
        }
        Ok(items)
    }

    /// Effects of a call on globals, as havoc targets.
    fn callee_effects(&self, callee: &TMethod) -> Vec<HavocTarget> {
        if callee.pure {
            return Vec::new();
        }
        let mut out: Vec<HavocTarget> = Vec::new();
        let mut add = |name: String, elements_only: bool| match out.iter_mut().find(|t| t.name == name) {
            Some(t) => t.elements_only &= elements_only,
            None => out.push(HavocTarget { name, elements_only }),
        };
        match &callee.assignable {
            None => {
                for g in &self.program.globals {
                    add(self.globals[&g.name].clone(), false);
                }
            }
            Some(refs) => {
                for r in refs {
                    match r {
                        TStoreRef::Everything(_) => {
                            for g in &self.program.globals {
                                add(self.globals[&g.name].clone(), false);
                            }
                        }
                        TStoreRef::Nothing(_) => {}
                        TStoreRef::Name(v, _) if v.scope == Scope::Global => add(self.globals[&v.name].clone(), false),
                        TStoreRef::AllElements(v, _) | TStoreRef::Range(v, _, _, _) if v.scope == Scope::Global => {
                            add(self.globals[&v.name].clone(), true)
                        }
                        _ => {}
                    }
                }
            }
        }
        out
    }

    fn stmts(&mut self, ss: &[TStmt], out: &mut Vec<Cmd>, top_level: bool) -> WResult<bool> {
        self.scopes.push(HashMap::new());
        let mut returned = false;
        for (i, s) in ss.iter().enumerate() {
            let trailing = top_level && i + 1 == ss.len();
            if self.stmt(s, out, trailing)? {
                returned = true;
                break;
            }
        }
        self.scopes.pop();
        Ok(returned)
    }

    fn declare_local(&mut self, v: &VarRef) -> String {
        let n = self.register(&v.name, sort_of(v.ty), VarRole::Local, v.nullable);
        self.scopes.last_mut().expect("scope").insert(v.name.clone(), n.clone());
        n
    }

    fn nonnull_assign_check(
        &mut self,
        target_nullable: bool,
        target_ty: Type,
        value: &TExpr,
        t: &Term,
        span: Span,
        origin: Origin,
        out: &mut Vec<Cmd>,
    ) {
        if target_ty == Type::IntArray && !target_nullable && self.expr_nullable(value, &Cx::code(origin)) {
            let g = Term::not(Term::is_null(t.clone()));
            self.assert_cmd(g, AssertKind::NullDeref, span, "assign-nonnull".into(), origin, out);
        }
    }

    fn elem_checks(&mut self, v: &VarRef, name: &str, idx: &Term, span: Span, origin: Origin, out: &mut Vec<Cmd>) {
        let a = Term::var(name);
        if v.nullable {
            let g = Term::not(Term::is_null(a.clone()));
            self.assert_cmd(
                g,
                AssertKind::NullDeref,
                span,
                check_detail("store", AssertKind::NullDeref),
                origin,
                out,
            );
        }
        let g = Term::and(Term::le(Term::int(0), idx.clone()), Term::lt(idx.clone(), Term::len(a)));
        self.assert_cmd(
            g,
            AssertKind::IndexBounds,
            span,
            check_detail("store", AssertKind::IndexBounds),
            origin,
            out,
        );
    }

    /// Returns true when the statement always returns.
    fn stmt(&mut self, s: &TStmt, out: &mut Vec<Cmd>, trailing: bool) -> WResult<bool> {
        let origin = Origin::new(s.span, OriginKind::Stmt);
        let code = Cx::code(origin);
        match &s.kind {
            TStmtKind::VarDecl { var, init } => {
                let t = match init {
                    Some(e) => Some((e, self.tr_top(e, &code, out)?)),
                    None => None,
                };
                let name = self.declare_local(var);
                if let Some((e, t)) = t {
                    self.nonnull_assign_check(var.nullable, var.ty, e, &t, s.span, origin, out);
                    out.push(Cmd::Assign {
                        lhs: Lhs::Var(name),
                        value: t,
                        origin,
                    });
                }
            }
            TStmtKind::Assign {
                target: TLValue::Var(v, _),
                value,
            } => {
                let t = self.tr_top(value, &code, out)?;
                self.nonnull_assign_check(v.nullable, v.ty, value, &t, s.span, origin, out);
                out.push(Cmd::Assign {
                    lhs: Lhs::Var(self.name_of(v)),
                    value: t,
                    origin,
                });
            }
            TStmtKind::Assign {
                target: TLValue::Index(v, _, idx),
                value,
            } => {
                let ti = self.tr_top(idx, &code, out)?;
                let tv = self.tr_top(value, &code, out)?;
                let name = self.name_of(v);
                self.elem_checks(v, &name, &ti, s.span, origin, out);
                out.push(Cmd::Assign {
                    lhs: Lhs::Elem(name, ti),
                    value: tv,
                    origin,
                });
            }
            TStmtKind::Call { target, callee, args } => self.call(s, target.as_ref(), callee, args, out)?,
            TStmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let tc = self.tr_top(cond, &code, out)?;
                let mut then_cmds = Vec::new();
                let mut else_cmds = Vec::new();
                let r1 = self.stmts(then_branch, &mut then_cmds, false)?;
                let r2 = self.stmts(else_branch, &mut else_cmds, false)?;
                out.push(Cmd::If {
                    cond: tc,
                    then_cmds,
                    else_cmds,
                    origin,
                });
                return Ok(r1 && r2);
            }
            TStmtKind::While {
                cond,
                invariants,
                decreases,
                body,
            } => self.r#loop(s, cond, invariants, decreases.as_ref(), body, out)?,
            TStmtKind::Return(value) => {
                if let Some(v) = value {
                    let t = self.tr_top(v, &code, out)?;
                    out.push(Cmd::Assign {
                        lhs: Lhs::Var(RESULT.into()),
                        value: t,
                        origin,
                    });
                }
                if !trailing {
                    out.push(Cmd::Return { origin });
                }
                return Ok(true);
            }
            TStmtKind::Assert(e) => {
                let t = self.tr_top(e, &Cx::spec("assert", origin), out)?;
                self.assert_cmd(t, AssertKind::ExplicitAssert, e.span, "assert".into(), origin, out);
            }
            TStmtKind::Assume(e) => {
                let t = self.tr_top(e, &Cx::spec("assume", origin), out)?;
                out.push(Cmd::Assume {
                    term: t,
                    role: AssumeRole::Stmt,
                    origin,
                });
            }
            TStmtKind::Block(b) => return self.stmts(b, out, false),
        }
        Ok(false)
    }

    fn call(
        &mut self,
        s: &TStmt,
        target: Option<&TLValue>,
        callee_name: &str,
        args: &[TExpr],
        out: &mut Vec<Cmd>,
    ) -> WResult<()> {
        let program = self.program;
        let callee = program.method(callee_name).ok_or_else(|| WeaveError {
            span: s.span,
            message: format!("unknown method `{callee_name}`"),
        })?;
        let k = self.calls.len();
        let origin = Origin::new(s.span, OriginKind::Call);
        let code = Cx::code(origin);
        let mut subst = HashMap::new();
        let mut bindings = Vec::new();
        let mut copy_out = Vec::new();
        let mut array_args = Vec::new();
        for (j, (arg, param)) in args.iter().zip(&callee.params).enumerate() {
            if param.ty == Type::IntArray {
                let TExprKind::Var(v) = &arg.kind else {
                    return Err(WeaveError {
                        span: arg.span,
                        message: "array arguments must be variables".into(),
                    });
                };
                let cn = self.name_of(v);
                subst.insert(param.name.clone(), Term::var(cn.clone()));
                bindings.push((param.name.clone(), Term::var(cn.clone())));
                copy_out.push((param.name.clone(), cn.clone()));
                array_args.push((j, arg, v.nullable, param.nullable, cn));
            } else {
                let t = self.tr_top(arg, &code, out)?;
                let temp = self.temp(format!("$a{k}_{j}"), sort_of(param.ty), false);
                out.push(Cmd::Assign {
                    lhs: Lhs::Var(temp.clone()),
                    value: t,
                    origin,
                });
                subst.insert(param.name.clone(), Term::var(temp.clone()));
                bindings.push((param.name.clone(), Term::var(temp)));
            }
        }
        for (_, arg, arg_nullable, param_nullable, cn) in &array_args {
            if *arg_nullable && !*param_nullable {
                let g = Term::not(Term::is_null(Term::var(cn.clone())));
                self.assert_cmd(g, AssertKind::CallPre, arg.span, "arg-nonnull".into(), origin, out);
            }
        }
        let pre_cx = Cx {
            subst: Some(&subst),
            ..Cx::spec(format!("callpre@{}", s.span), origin)
        };
        for (j, req) in callee.requires.iter().enumerate() {
            let t = self.tr_top(req, &pre_cx, out)?;
            self.assert_cmd(t, AssertKind::CallPre, s.span, format!("pre#{j}"), origin, out);
        }
        for inv in &program.invariants {
            let t = self.tr_top(&inv.expr, &Cx::spec(format!("ginv-call@{}", s.span), origin), out)?;
            self.assert_cmd(
                t,
                AssertKind::GlobalInvariant,
                inv.span,
                format!("call@{}", s.span),
                origin,
                out,
            );
        }
        let tag = format!("call#{k}");
        out.push(Cmd::Snapshot { tag: tag.clone() });
        let result = callee
            .ret
            .map(|(ty, nullable)| self.temp(format!("$r{k}"), sort_of(ty), nullable));
        let mut targets: Vec<HavocTarget> = Vec::new();
        if let Some(r) = &result {
            targets.push(HavocTarget {
                name: r.clone(),
                elements_only: false,
            });
        }
        for (_, _, _, _, cn) in &array_args {
            if !targets.iter().any(|t| &t.name == cn) {
                targets.push(HavocTarget {
                    name: cn.clone(),
                    elements_only: true,
                });
            }
        }
        for t in self.callee_effects(callee) {
            match targets.iter_mut().find(|x| x.name == t.name) {
                Some(x) => x.elements_only &= t.elements_only,
                None => targets.push(t),
            }
        }
        let havocked: Vec<(String, bool)> = targets.iter().map(|t| (t.name.clone(), !t.elements_only)).collect();
        out.push(Cmd::Havoc {
            targets,
            site: HavocSite::Call(k),
            origin,
        });
        self.range_assumes(&havocked, origin, out);
        let post_cx = Cx {
            silent: true,
            old_tag: Some(tag.clone()),
            result: result
                .as_ref()
                .map(|r| (Term::var(r.clone()), callee.ret.is_some_and(|(_, n)| n))),
            ..pre_cx.clone()
        };
        for ens in &callee.ensures {
            let t = self.tr_top(ens, &post_cx, out)?;
            out.push(Cmd::Assume {
                term: t,
                role: AssumeRole::CallPost,
                origin,
            });
        }
        for (_, t) in self.frame_conjuncts(callee, &tag, &post_cx, out)? {
            out.push(Cmd::Assume {
                term: t,
                role: AssumeRole::CallPost,
                origin,
            });
        }
        match (target, &result) {
            (Some(TLValue::Var(v, _)), Some(r)) => {
                if v.ty == Type::IntArray && !v.nullable && self.var_is_nullable(r) {
                    let g = Term::not(Term::is_null(Term::var(r.clone())));
                    self.assert_cmd(g, AssertKind::NullDeref, s.span, "assign-nonnull".into(), origin, out);
                }
                out.push(Cmd::Assign {
                    lhs: Lhs::Var(self.name_of(v)),
                    value: Term::var(r.clone()),
                    origin,
                });
            }
            (Some(TLValue::Index(v, _, idx)), Some(r)) => {
                let ti = self.tr_top(idx, &code, out)?;
                let name = self.name_of(v);
                self.elem_checks(v, &name, &ti, s.span, origin, out);
                out.push(Cmd::Assign {
                    lhs: Lhs::Elem(name, ti),
                    value: Term::var(r.clone()),
                    origin,
                });
            }
            _ => {}
        }
        for inv in &program.invariants {
            let t = self.tr_top(
                &inv.expr,
                &Cx {
                    silent: true,
                    ..Cx::spec("", origin)
                },
                out,
            )?;
            out.push(Cmd::Assume {
                term: t,
                role: AssumeRole::Invariant,
                origin,
            });
        }
        self.calls.push(CallSite {
            index: k,
            callee: callee_name.into(),
            span: s.span,
            bindings,
            copy_out,
            result,
        });
        Ok(())
    }

    fn loop_targets(&self, body: &[TStmt], out: &mut Vec<HavocTarget>) {
        let add = |out: &mut Vec<HavocTarget>, name: String, elements_only: bool| match out
            .iter_mut()
            .find(|t| t.name == name)
        {
            Some(t) => t.elements_only &= elements_only,
            None => out.push(HavocTarget { name, elements_only }),
        };
        let resolve = |v: &VarRef| -> Option<String> {
            match v.scope {
                Scope::Local => self.scopes.iter().rev().find_map(|s| s.get(&v.name)).cloned(),
                Scope::Bound => None,
                _ => Some(self.name_of(v)),
            }
        };
        for s in body {
            match &s.kind {
                TStmtKind::Assign { target, .. } => {
                    if let Some(n) = resolve(target.var()) {
                        add(out, n, matches!(target, TLValue::Index(..)));
                    }
                }
                TStmtKind::Call { target, callee, args } => {
                    if let Some(t) = target {
                        if let Some(n) = resolve(t.var()) {
                            add(out, n, matches!(t, TLValue::Index(..)));
                        }
                    }
                    for a in args {
                        if let TExprKind::Var(v) = &a.kind {
                            if v.ty == Type::IntArray {
                                if let Some(n) = resolve(v) {
                                    add(out, n, true);
                                }
                            }
                        }
                    }
                    if let Some(c) = self.program.method(callee) {
                        for t in self.callee_effects(c) {
                            add(out, t.name, t.elements_only);
                        }
                    }
                }
                TStmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    self.loop_targets(then_branch, out);
                    self.loop_targets(else_branch, out);
                }
                TStmtKind::While { body, .. } | TStmtKind::Block(body) => self.loop_targets(body, out),
                _ => {}
            }
        }
    }

    fn r#loop(
        &mut self,
        s: &TStmt,
        cond: &TExpr,
        invariants: &[TExpr],
        decreases: Option<&TExpr>,
        body: &[TStmt],
        out: &mut Vec<Cmd>,
    ) -> WResult<()> {
        let k = self.loops;
        self.loops += 1;
        let origin = Origin::new(s.span, OriginKind::Loop);
        for inv in invariants {
            let t = self.tr_top(inv, &Cx::spec("inv-entry", origin), out)?;
            self.assert_cmd(t, AssertKind::LoopInvEntry, inv.span, "inv-entry".into(), origin, out);
        }
        out.push(Cmd::Snapshot {
            tag: format!("loop#{k}"),
        });
        let mut targets = Vec::new();
        self.loop_targets(body, &mut targets);
        let havocked: Vec<(String, bool)> = targets.iter().map(|t| (t.name.clone(), !t.elements_only)).collect();
        out.push(Cmd::Havoc {
            targets,
            site: HavocSite::Loop(k),
            origin,
        });
        self.range_assumes(&havocked, origin, out);
        for inv in invariants {
            let t = self.tr_top(
                inv,
                &Cx {
                    silent: true,
                    ..Cx::spec("", origin)
                },
                out,
            )?;
            out.push(Cmd::Assume {
                term: t,
                role: AssumeRole::LoopInv,
                origin,
            });
        }
        let d0 = match decreases {
            Some(d) => {
                let t = self.tr_top(d, &Cx::spec("dec-entry", origin), out)?;
                let name = self.temp(format!("$d{k}"), Sort::Int, false);
                out.push(Cmd::Assign {
                    lhs: Lhs::Var(name.clone()),
                    value: t,
                    origin,
                });
                Some(name)
            }
            None => None,
        };
        let tc = self.tr_top(cond, &Cx::code(origin), out)?;
        let mut then_cmds = Vec::new();
        if !self.stmts(body, &mut then_cmds, false)? {
            for inv in invariants {
                let t = self.tr_top(inv, &Cx::spec("inv-preserved", origin), &mut then_cmds)?;
                self.assert_cmd(
                    t,
                    AssertKind::LoopInvPreserved,
                    inv.span,
                    "inv-preserved".into(),
                    origin,
                    &mut then_cmds,
                );
            }
            if let (Some(d), Some(d0)) = (decreases, d0) {
                let t = self.tr_top(d, &Cx::spec("dec", origin), &mut then_cmds)?;
                let bound = Term::bin(BinaryOp::Ge, t.clone(), Term::int(0));
                self.assert_cmd(
                    bound,
                    AssertKind::DecreasesBound,
                    d.span,
                    "bound".into(),
                    origin,
                    &mut then_cmds,
                );
                let dec = Term::lt(t, Term::var(d0));
                self.assert_cmd(
                    dec,
                    AssertKind::DecreasesDecrease,
                    d.span,
                    "decrease".into(),
                    origin,
                    &mut then_cmds,
                );
            }
            then_cmds.push(Cmd::Assume {
                term: Term::Bool(false),
                role: AssumeRole::LoopBack(k),
                origin,
            });
        }
        out.push(Cmd::If {
            cond: tc,
            then_cmds,
            else_cmds: Vec::new(),
            origin,
        });
        Ok(())
    }
}

/// Lengths are ints too, so they cannot exceed `MAX32`.
fn array_elements_in_range(a: Term) -> Term {
    let k = Term::Bound("$k".into());
    let range = Term::and(
        Term::le(Term::int(0), k.clone()),
        Term::lt(k.clone(), Term::len(a.clone())),
    );
    Term::and(
        Term::le(Term::len(a.clone()), Term::int(MAX32)),
        Term::forall("$k", Term::implies(range, Term::in_range(Term::select(a, k)))),
    )
}

fn frame_term(v: Term, ty: Type, c: &Cover, tag: &str) -> Option<Term> {
    if c.whole {
        return None;
    }
    if ty != Type::IntArray {
        return Some(Term::eq(v.clone(), Term::old(tag, v)));
    }
    let shape = Term::and(
        Term::eq(Term::is_null(v.clone()), Term::old(tag, Term::is_null(v.clone()))),
        Term::eq(Term::len(v.clone()), Term::old(tag, Term::len(v.clone()))),
    );
    if c.all_elements {
        return Some(shape);
    }
    let k = Term::Bound("$k".into());
    let mut guard = Term::and_all([
        Term::le(Term::int(0), k.clone()),
        Term::lt(k.clone(), Term::len(v.clone())),
        Term::lt(k.clone(), Term::old(tag, Term::len(v.clone()))),
    ]);
    for (lo, hi) in &c.ranges {
        let inside = Term::and(Term::le(lo.clone(), k.clone()), Term::le(k.clone(), hi.clone()));
        guard = Term::and(guard, Term::not(inside));
    }
    let same = Term::eq(Term::select(v.clone(), k.clone()), Term::old(tag, Term::select(v, k)));
    Some(Term::and(shape, Term::forall("$k", Term::implies(guard, same))))
}

/// Weave one method with a body.
pub fn weave_method(program: &TypedProgram, method: &TMethod, mode: ArithmeticMode) -> Result<GuardedBody, WeaveError> {
    let body = method.body.as_ref().ok_or_else(|| WeaveError {
        span: method.name_span,
        message: format!("method `{}` has no body", method.name),
    })?;
    let mut w = Weaver::new(program, method, mode);
    let mut cmds = Vec::new();
    w.entry(&mut cmds)?;
    w.stmts(body, &mut cmds, true)?;
    let mut exit = Vec::new();
    w.exit(&mut exit)?;
    Ok(GuardedBody {
        method: method.name.clone(),
        mode,
        vars: w.vars,
        cmds,
        exit,
        assertions: w.assertions,
        calls: w.calls,
        loop_count: w.loops,
    })
}

/// Weave every method that has a body, in declaration order.
pub fn weave_program(program: &TypedProgram, mode: ArithmeticMode) -> Vec<(String, Result<GuardedBody, WeaveError>)> {
    program
        .methods
        .iter()
        .filter(|m| m.body.is_some())
        .map(|m| (m.name.clone(), weave_method(program, m, mode)))
        .collect()
}

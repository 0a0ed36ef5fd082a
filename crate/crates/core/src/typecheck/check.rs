//! Name resolution and type checking.

use std::collections::HashMap;

use crate::diag::{codes, Diagnostic};
use crate::frontend::ast::*;
use crate::source::Span;

use super::typed::*;

#[derive(Clone, Copy, Default)]
struct Ctx {
    spec: bool,
    ensures: bool,
    result_ok: bool,
    in_old: bool,
    /// Only globals are visible (global invariants).
    globals_only: bool,
}

impl Ctx {
    fn code() -> Self {
        Ctx::default()
    }
    fn spec() -> Self {
        Ctx {
            spec: true,
            ..Ctx::default()
        }
    }
}

struct MethodSig {
    params: Vec<(Type, bool)>,
    ret: Option<(Type, bool)>,
}

struct Checker<'p> {
    program: &'p Program,
    diags: Vec<Diagnostic>,
    globals: HashMap<String, TGlobal>,
    sigs: HashMap<String, MethodSig>,
    params: Vec<TParam>,
    locals: Vec<Vec<VarRef>>,
    bound: Vec<String>,
    current_ret: Option<(Type, bool)>,
}

fn bad() -> TExpr {
    // Placeholder for an expression that failed to check; typed `int` so
    // checking can continue.
    TExpr {
        kind: TExprKind::Int(0.into()),
        ty: Type::Int,
        span: Span::default(),
    }
}

impl<'p> Checker<'p> {
    fn err(&mut self, code: &'static str, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, msg));
    }

    fn lookup(&self, name: &str, ctx: Ctx) -> Option<VarRef> {
        if self.bound.iter().any(|b| b == name) {
            return Some(VarRef {
                name: name.into(),
                scope: Scope::Bound,
                ty: Type::Int,
                nullable: false,
            });
        }
        if !ctx.globals_only {
            for scope in self.locals.iter().rev() {
                if let Some(v) = scope.iter().find(|v| v.name == name) {
                    return Some(v.clone());
                }
            }
            if let Some(p) = self.params.iter().find(|p| p.name == name) {
                return Some(p.var_ref());
            }
        }
        self.globals.get(name).map(TGlobal::var_ref)
    }

    fn local_or_param_exists(&self, name: &str) -> bool {
        self.params.iter().any(|p| p.name == name) || self.locals.iter().flatten().any(|v| v.name == name)
    }

    fn expect_type(&mut self, e: &TExpr, ty: Type) {
        if e.ty != ty {
            if ty == Type::Bool {
                self.err(
                    codes::TYPE_BOOL_EXPECTED,
                    e.span,
                    format!("bool expected, found {}", e.ty),
                );
            } else {
                self.err(codes::TYPE_MISMATCH, e.span, format!("{ty} expected, found {}", e.ty));
            }
        }
    }

    fn expr(&mut self, e: &Expr, ctx: Ctx) -> TExpr {
        let span = e.span;
        let mk = |kind, ty| TExpr { kind, ty, span };
        match &e.kind {
            ExprKind::Int(v) => mk(TExprKind::Int(v.clone()), Type::Int),
            ExprKind::Bool(b) => mk(TExprKind::Bool(*b), Type::Bool),
            ExprKind::Var(name) => match self.lookup(name, ctx) {
                Some(v) => {
                    let ty = v.ty;
                    mk(TExprKind::Var(v), ty)
                }
                None => {
                    self.err(codes::TYPE_UNRESOLVED, span, format!("unresolved name `{name}`"));
                    bad()
                }
            },
            ExprKind::Result => {
                if !ctx.ensures {
                    self.err(
                        codes::TYPE_RESULT_PLACEMENT,
                        span,
                        "\\result may only appear in ensures clauses",
                    );
                    return bad();
                }
                if !ctx.result_ok {
                    self.err(
                        codes::TYPE_RESULT_PLACEMENT,
                        span,
                        "\\result used in a method without a result",
                    );
                    return bad();
                }
                let (ty, _) = self.current_ret.expect("result_ok implies a return type");
                mk(TExprKind::Result, ty)
            }
            ExprKind::Unary(op, a) => {
                let ta = self.expr(a, ctx);
                let ty = match op {
                    UnaryOp::Neg => Type::Int,
                    UnaryOp::Not => Type::Bool,
                };
                self.expect_type(&ta, ty);
                mk(TExprKind::Unary(*op, Box::new(ta)), ty)
            }
            ExprKind::Binary(op @ (BinaryOp::Eq | BinaryOp::Ne), a, b)
                if matches!(a.kind, ExprKind::Null) != matches!(b.kind, ExprKind::Null) =>
            {
                let other = if matches!(a.kind, ExprKind::Null) { b } else { a };
                let arr = self.expr(other, ctx);
                self.expect_type(&arr, Type::IntArray);
                let test = mk(TExprKind::IsNull(Box::new(arr)), Type::Bool);
                if *op == BinaryOp::Eq {
                    test
                } else {
                    mk(TExprKind::Unary(UnaryOp::Not, Box::new(test)), Type::Bool)
                }
            }
            ExprKind::Null => {
                self.err(
                    codes::TYPE_MISMATCH,
                    span,
                    "`null` may only be compared with an array using == or !=",
                );
                bad()
            }
            ExprKind::Binary(op, a, b) => {
                let ta = self.expr(a, ctx);
                let tb = self.expr(b, ctx);
                let ty = match op {
                    BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod => {
                        self.expect_type(&ta, Type::Int);
                        self.expect_type(&tb, Type::Int);
                        Type::Int
                    }
                    BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                        self.expect_type(&ta, Type::Int);
                        self.expect_type(&tb, Type::Int);
                        Type::Bool
                    }
                    BinaryOp::Eq | BinaryOp::Ne => {
                        if ta.ty == Type::IntArray || tb.ty == Type::IntArray {
                            self.err(codes::TYPE_MISMATCH, span, "arrays cannot be compared with == or !=");
                        } else if ta.ty != tb.ty {
                            self.err(
                                codes::TYPE_MISMATCH,
                                span,
                                format!("cannot compare {} with {}", ta.ty, tb.ty),
                            );
                        }
                        Type::Bool
                    }
                    BinaryOp::And | BinaryOp::Or | BinaryOp::Implies => {
                        self.expect_type(&ta, Type::Bool);
                        self.expect_type(&tb, Type::Bool);
                        Type::Bool
                    }
                };
                mk(TExprKind::Binary(*op, Box::new(ta), Box::new(tb)), ty)
            }
            ExprKind::Index(a, i) => {
                let ta = self.expr(a, ctx);
                let ti = self.expr(i, ctx);
                self.expect_type(&ta, Type::IntArray);
                self.expect_type(&ti, Type::Int);
                mk(TExprKind::Index(Box::new(ta), Box::new(ti)), Type::Int)
            }
            ExprKind::Length(a) => {
                let ta = self.expr(a, ctx);
                self.expect_type(&ta, Type::IntArray);
                mk(TExprKind::Length(Box::new(ta)), Type::Int)
            }
            ExprKind::Old(a) => {
                if !ctx.ensures {
                    self.err(
                        codes::TYPE_OLD_PLACEMENT,
                        span,
                        "old(..) may only appear in ensures clauses",
                    );
                    return bad();
                }
                if ctx.in_old {
                    self.err(codes::TYPE_OLD_PLACEMENT, span, "nested old(..) is not allowed");
                    return bad();
                }
                let inner = self.expr(a, Ctx { in_old: true, ..ctx });
                let ty = inner.ty;
                mk(TExprKind::Old(Box::new(inner)), ty)
            }
            ExprKind::Call(callee, args) => {
                if !ctx.spec {
                    self.err(
                        codes::TYPE_CALL_POSITION,
                        span,
                        "calls in code must be statements (`x := f(..);` or `f(..);`)",
                    );
                }
                let targs: Vec<_> = args.iter().map(|a| self.expr(a, ctx)).collect();
                match self.check_call_args(callee, &targs, span) {
                    Some(Some((ty, _))) => mk(TExprKind::Call(callee.name.clone(), targs), ty),
                    Some(None) => {
                        self.err(
                            codes::TYPE_MISMATCH,
                            span,
                            format!(
                                "method `{}` has no result and cannot be used in an expression",
                                callee.name
                            ),
                        );
                        bad()
                    }
                    None => bad(),
                }
            }
            ExprKind::Quant(q, var, body) => {
                if !ctx.spec {
                    self.err(
                        codes::TYPE_QUANT_POSITION,
                        span,
                        "quantifiers may only appear in specifications",
                    );
                }
                if self.bound.contains(&var.name) || (!ctx.globals_only && self.local_or_param_exists(&var.name)) {
                    self.err(
                        codes::TYPE_DUPLICATE,
                        var.span,
                        format!("quantified variable `{}` shadows a local variable", var.name),
                    );
                }
                self.bound.push(var.name.clone());
                let tb = self.expr(body, ctx);
                self.bound.pop();
                self.expect_type(&tb, Type::Bool);
                mk(TExprKind::Quant(*q, var.name.clone(), Box::new(tb)), Type::Bool)
            }
        }
    }

    /// Returns `None` on resolution failure, otherwise the callee's return type.
    fn check_call_args(&mut self, callee: &Ident, args: &[TExpr], span: Span) -> Option<Option<(Type, bool)>> {
        let Some(sig) = self.sigs.get(&callee.name) else {
            self.err(
                codes::TYPE_UNRESOLVED,
                callee.span,
                format!("unknown method `{}`", callee.name),
            );
            return None;
        };
        let ret = sig.ret;
        let params = sig.params.clone();
        if params.len() != args.len() {
            self.err(
                codes::TYPE_ARITY,
                span,
                format!(
                    "`{}` expects {} argument(s), found {}",
                    callee.name,
                    params.len(),
                    args.len()
                ),
            );
            return Some(ret);
        }
        for (arg, (ty, _)) in args.iter().zip(&params) {
            self.expect_type(arg, *ty);
            if arg.ty == Type::IntArray && !matches!(arg.kind, TExprKind::Var(_)) {
                self.err(codes::TYPE_MISMATCH, arg.span, "array arguments must be variables");
            }
        }
        Some(ret)
    }

    fn cond(&mut self, e: &Expr, ctx: Ctx) -> TExpr {
        let t = self.expr(e, ctx);
        self.expect_type(&t, Type::Bool);
        t
    }

    fn declare_local(&mut self, name: &Ident, ty: &TypeRef) -> VarRef {
        if self.local_or_param_exists(&name.name) {
            self.err(
                codes::TYPE_DUPLICATE,
                name.span,
                format!("`{}` shadows a local variable or parameter", name.name),
            );
        }
        let v = VarRef {
            name: name.name.clone(),
            scope: Scope::Local,
            ty: ty.base.into(),
            nullable: ty.nullable,
        };
        self.locals.last_mut().expect("inside a block").push(v.clone());
        v
    }

    fn lvalue(&mut self, l: &LValue) -> Option<TLValue> {
        let root = l.root();
        let Some(v) = self.lookup(&root.name, Ctx::code()) else {
            self.err(
                codes::TYPE_UNRESOLVED,
                root.span,
                format!("unresolved name `{}`", root.name),
            );
            return None;
        };
        match l {
            LValue::Var(id) => {
                if v.scope == Scope::Param {
                    self.err(
                        codes::TYPE_IMMUTABLE,
                        id.span,
                        format!("parameter `{}` cannot be assigned", id.name),
                    );
                }
                Some(TLValue::Var(v, id.span))
            }
            LValue::Index(id, idx) => {
                if v.ty != Type::IntArray {
                    self.err(codes::TYPE_MISMATCH, id.span, format!("`{}` is not an array", id.name));
                }
                let ti = self.expr(idx, Ctx::code());
                self.expect_type(&ti, Type::Int);
                Some(TLValue::Index(v, id.span, ti))
            }
        }
    }

    fn lvalue_type(l: &TLValue) -> Type {
        match l {
            TLValue::Var(v, _) => v.ty,
            TLValue::Index(..) => Type::Int,
        }
    }

    fn block(&mut self, b: &Block) -> Vec<TStmt> {
        self.locals.push(Vec::new());
        let mut out = Vec::new();
        for s in &b.stmts {
            self.stmt(s, &mut out);
        }
        self.locals.pop();
        out
    }

    fn call_stmt(&mut self, target: Option<TLValue>, callee: &Ident, args: &[Expr], span: Span) -> Option<TStmt> {
        let targs: Vec<_> = args.iter().map(|a| self.expr(a, Ctx::code())).collect();
        let ret = self.check_call_args(callee, &targs, span)?;
        if let Some(t) = &target {
            match ret {
                None => self.err(
                    codes::TYPE_MISMATCH,
                    span,
                    format!("method `{}` has no result to assign", callee.name),
                ),
                Some((ty, _)) if ty != Self::lvalue_type(t) => self.err(
                    codes::TYPE_MISMATCH,
                    span,
                    format!("cannot assign {ty} to {}", Self::lvalue_type(t)),
                ),
                _ => {}
            }
        }
        self.check_aliasing(&callee.name, &targs, target.as_ref());
        Some(TStmt {
            kind: TStmtKind::Call {
                target,
                callee: callee.name.clone(),
                args: targs,
            },
            span,
        })
    }

    /// Array arguments are copied in and out; reject calls where two copies
    /// would refer to the same variable.
    fn check_aliasing(&mut self, callee: &str, args: &[TExpr], target: Option<&TLValue>) {
        let mut seen: Vec<&str> = Vec::new();
        let callee_decl = self.program.method(callee);
        for a in args {
            if let TExprKind::Var(v) = &a.kind {
                if v.ty != Type::IntArray {
                    continue;
                }
                if seen.contains(&v.name.as_str()) {
                    self.err(
                        codes::TYPE_ALIASING,
                        a.span,
                        format!("array `{}` passed more than once", v.name),
                    );
                }
                seen.push(&v.name);
                if let Some(t) = target {
                    if t.var().name == v.name {
                        self.err(
                            codes::TYPE_ALIASING,
                            a.span,
                            format!("array `{}` is both an argument and the call target", v.name),
                        );
                    }
                }
                if v.scope == Scope::Global {
                    let may_write = match callee_decl {
                        Some(m) if m.pure => false,
                        Some(m) => match m.assignable() {
                            None => true,
                            Some(refs) => refs.iter().any(|r| match r {
                                StoreRef::Everything(_) => true,
                                StoreRef::Nothing(_) => false,
                                StoreRef::Name(id) | StoreRef::AllElements(id) | StoreRef::Range(id, _, _) => {
                                    id.name == v.name && m.params.iter().all(|p| p.name.name != v.name)
                                }
                            }),
                        },
                        None => false,
                    };
                    if may_write {
                        self.err(
                            codes::TYPE_ALIASING,
                            a.span,
                            format!("global array `{}` is passed to `{callee}`, which may modify it", v.name),
                        );
                    }
                }
            }
        }
    }

    fn stmt(&mut self, s: &Stmt, out: &mut Vec<TStmt>) {
        let span = s.span;
        match &s.kind {
            StmtKind::VarDecl { name, ty, init } => {
                if let ExprKind::Call(callee, args) = &init.kind {
                    let v = self.declare_local(name, ty);
                    out.push(TStmt {
                        kind: TStmtKind::VarDecl {
                            var: v.clone(),
                            init: None,
                        },
                        span,
                    });
                    let target = Some(TLValue::Var(v, name.span));
                    if let Some(call) = self.call_stmt(target, callee, args, init.span) {
                        out.push(TStmt { span, ..call });
                    }
                    return;
                }
                let tinit = self.expr(init, Ctx::code());
                self.expect_type(&tinit, ty.base.into());
                let v = self.declare_local(name, ty);
                out.push(TStmt {
                    kind: TStmtKind::VarDecl {
                        var: v,
                        init: Some(tinit),
                    },
                    span,
                });
            }
            StmtKind::Assign { target, value } => {
                let tv = self.expr(value, Ctx::code());
                if let Some(tl) = self.lvalue(target) {
                    self.expect_type(&tv, Self::lvalue_type(&tl));
                    out.push(TStmt {
                        kind: TStmtKind::Assign { target: tl, value: tv },
                        span,
                    });
                }
            }
            StmtKind::Call { target, callee, args } => {
                let tl = match target {
                    Some(t) => match self.lvalue(t) {
                        Some(tl) => Some(tl),
                        None => return,
                    },
                    None => None,
                };
                if let Some(call) = self.call_stmt(tl, callee, args, span) {
                    out.push(call);
                }
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let tc = self.cond(cond, Ctx::code());
                let tt = self.block(then_branch);
                let te = else_branch.as_ref().map(|b| self.block(b)).unwrap_or_default();
                out.push(TStmt {
                    kind: TStmtKind::If {
                        cond: tc,
                        then_branch: tt,
                        else_branch: te,
                    },
                    span,
                });
            }
            StmtKind::While {
                cond,
                invariants,
                decreases,
                body,
            } => {
                let tinv: Vec<_> = invariants.iter().map(|i| self.cond(i, Ctx::spec())).collect();
                let tdec = decreases.as_ref().map(|d| {
                    let t = self.expr(d, Ctx::spec());
                    self.expect_type(&t, Type::Int);
                    t
                });
                let tc = self.cond(cond, Ctx::code());
                let tb = self.block(body);
                out.push(TStmt {
                    kind: TStmtKind::While {
                        cond: tc,
                        invariants: tinv,
                        decreases: tdec,
                        body: tb,
                    },
                    span,
                });
            }
            StmtKind::Return(value) => {
                let tv = value.as_ref().map(|v| self.expr(v, Ctx::code()));
                match (&tv, self.current_ret) {
                    (Some(v), Some((ty, _))) => self.expect_type(v, ty),
                    (Some(v), None) => self.err(
                        codes::TYPE_RETURN,
                        v.span,
                        "method without a result cannot return a value",
                    ),
                    (None, Some(_)) => self.err(codes::TYPE_RETURN, span, "missing return value"),
                    (None, None) => {}
                }
                out.push(TStmt {
                    kind: TStmtKind::Return(tv),
                    span,
                });
            }
            StmtKind::Assert(e) => {
                let t = self.cond(e, Ctx::spec());
                out.push(TStmt {
                    kind: TStmtKind::Assert(t),
                    span,
                });
            }
            StmtKind::Assume(e) => {
                let t = self.cond(e, Ctx::spec());
                out.push(TStmt {
                    kind: TStmtKind::Assume(t),
                    span,
                });
            }
            StmtKind::Block(b) => {
                let tb = self.block(b);
                out.push(TStmt {
                    kind: TStmtKind::Block(tb),
                    span,
                });
            }
        }
    }

    fn store_ref(&mut self, r: &StoreRef) -> Option<TStoreRef> {
        let resolve = |me: &mut Self, id: &Ident| -> Option<VarRef> {
            let found = me
                .params
                .iter()
                .find(|p| p.name == id.name)
                .map(TParam::var_ref)
                .or_else(|| me.globals.get(&id.name).map(TGlobal::var_ref));
            if found.is_none() {
                me.err(
                    codes::TYPE_BAD_STORE_REF,
                    id.span,
                    format!("`{}` is not a global or parameter of this method", id.name),
                );
            }
            found
        };
        match r {
            StoreRef::Everything(s) => Some(TStoreRef::Everything(*s)),
            StoreRef::Nothing(s) => Some(TStoreRef::Nothing(*s)),
            StoreRef::Name(id) => resolve(self, id).map(|v| TStoreRef::Name(v, id.span)),
            StoreRef::AllElements(id) => {
                let v = resolve(self, id)?;
                if v.ty != Type::IntArray {
                    self.err(
                        codes::TYPE_BAD_STORE_REF,
                        id.span,
                        format!("`{}` is not an array", id.name),
                    );
                }
                Some(TStoreRef::AllElements(v, r.span()))
            }
            StoreRef::Range(id, lo, hi) => {
                let v = resolve(self, id)?;
                if v.ty != Type::IntArray {
                    self.err(
                        codes::TYPE_BAD_STORE_REF,
                        id.span,
                        format!("`{}` is not an array", id.name),
                    );
                }
                let tlo = self.expr(lo, Ctx::spec());
                let thi = self.expr(hi, Ctx::spec());
                self.expect_type(&tlo, Type::Int);
                self.expect_type(&thi, Type::Int);
                Some(TStoreRef::Range(v, tlo, thi, r.span()))
            }
        }
    }

    fn method(&mut self, m: &MethodDecl) -> TMethod {
        self.params.clear();
        self.locals.clear();
        for p in &m.params {
            if self.params.iter().any(|q| q.name == p.name.name) {
                self.err(
                    codes::TYPE_DUPLICATE,
                    p.name.span,
                    format!("duplicate parameter `{}`", p.name.name),
                );
                continue;
            }
            self.params.push(TParam {
                name: p.name.name.clone(),
                ty: p.ty.base.into(),
                nullable: p.ty.nullable,
                span: p.name.span,
            });
        }
        self.current_ret = m.ret.map(|r| (r.base.into(), r.nullable));
        let requires: Vec<_> = m.requires().map(|e| self.cond(e, Ctx::spec())).collect();
        let ens_ctx = Ctx {
            spec: true,
            ensures: true,
            result_ok: self.current_ret.is_some(),
            ..Ctx::default()
        };
        let ensures: Vec<_> = m.ensures().map(|e| self.cond(e, ens_ctx)).collect();
        let assignable = m
            .assignable()
            .map(|refs| refs.iter().filter_map(|r| self.store_ref(r)).collect::<Vec<_>>());
        let body = m.body.as_ref().map(|b| {
            let stmts = self.block(b);
            if self.current_ret.is_some() && completes_normally(&stmts) {
                self.err(
                    codes::TYPE_MISSING_RETURN,
                    m.name.span,
                    format!("method `{}` may finish without returning a value", m.name.name),
                );
            }
            stmts
        });
        TMethod {
            name: m.name.name.clone(),
            name_span: m.name.span,
            params: self.params.clone(),
            ret: self.current_ret,
            pure: m.pure,
            requires,
            ensures,
            assignable,
            body,
            span: m.span,
            implicit_nonnull: Vec::new(),
        }
    }
}

fn completes_normally(stmts: &[TStmt]) -> bool {
    for s in stmts {
        let normal = match &s.kind {
            TStmtKind::Return(_) => false,
            TStmtKind::If {
                then_branch,
                else_branch,
                ..
            } => completes_normally(then_branch) || completes_normally(else_branch),
            TStmtKind::Block(b) => completes_normally(b),
            _ => true,
        };
        if !normal {
            return false;
        }
    }
    true
}

/// Resolve names and check types. Returns the typed program when no error
/// diagnostics were produced.
pub fn resolve_and_check(program: &Program) -> Result<TypedProgram, Vec<Diagnostic>> {
    let mut ck = Checker {
        program,
        diags: Vec::new(),
        globals: HashMap::new(),
        sigs: HashMap::new(),
        params: Vec::new(),
        locals: Vec::new(),
        bound: Vec::new(),
        current_ret: None,
    };
    let mut globals = Vec::new();
    for g in &program.globals {
        if ck.globals.contains_key(&g.name.name) {
            ck.err(
                codes::TYPE_DUPLICATE,
                g.name.span,
                format!("duplicate global `{}`", g.name.name),
            );
            continue;
        }
        let tg = TGlobal {
            name: g.name.name.clone(),
            ty: g.ty.base.into(),
            nullable: g.ty.nullable,
            span: g.span,
        };
        ck.globals.insert(tg.name.clone(), tg.clone());
        globals.push(tg);
    }
    for m in &program.methods {
        if ck.sigs.contains_key(&m.name.name) {
            ck.err(
                codes::TYPE_DUPLICATE,
                m.name.span,
                format!("duplicate method `{}`", m.name.name),
            );
            continue;
        }
        ck.sigs.insert(
            m.name.name.clone(),
            MethodSig {
                params: m.params.iter().map(|p| (p.ty.base.into(), p.ty.nullable)).collect(),
                ret: m.ret.map(|r| (r.base.into(), r.nullable)),
            },
        );
    }
    let inv_ctx = Ctx {
        spec: true,
        globals_only: true,
        ..Ctx::default()
    };
    let invariants: Vec<_> = program
        .invariants
        .iter()
        .map(|inv| TInvariant {
            expr: ck.cond(&inv.expr, inv_ctx),
            span: inv.span,
        })
        .collect();
    let mut methods = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for m in &program.methods {
        if !seen.insert(m.name.name.clone()) {
            continue;
        }
        methods.push(ck.method(m));
    }
    if ck.diags.iter().any(Diagnostic::is_error) {
        return Err(ck.diags);
    }
    Ok(TypedProgram {
        globals,
        invariants,
        methods,
        implicit_global_nonnull: Vec::new(),
        nullity_applied: false,
    })
}

//! Strict purity rules for specifications and `pure` methods.

use crate::diag::{codes, Diagnostic};

use super::typed::*;

fn calls_in(e: &TExpr, out: &mut Vec<(String, crate::source::Span)>) {
    e.walk(&mut |sub| {
        if let TExprKind::Call(name, _) = &sub.kind {
            out.push((name.clone(), sub.span));
        }
    });
}

fn spec_exprs_in_body<'a>(stmts: &'a [TStmt], out: &mut Vec<&'a TExpr>) {
    for s in stmts {
        match &s.kind {
            TStmtKind::While {
                invariants,
                decreases,
                body,
                ..
            } => {
                out.extend(invariants.iter());
                out.extend(decreases.iter());
                spec_exprs_in_body(body, out);
            }
            TStmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                spec_exprs_in_body(then_branch, out);
                spec_exprs_in_body(else_branch, out);
            }
            TStmtKind::Block(b) => spec_exprs_in_body(b, out),
            TStmtKind::Assert(e) | TStmtKind::Assume(e) => out.push(e),
            _ => {}
        }
    }
}

fn side_effects(p: &TypedProgram, stmts: &[TStmt], out: &mut Vec<Diagnostic>, method: &str) {
    for s in stmts {
        match &s.kind {
            TStmtKind::Assign { target, .. } => match target {
                TLValue::Var(v, span) if v.scope == Scope::Global => out.push(Diagnostic::error(
                    codes::PURITY_SIDE_EFFECT,
                    *span,
                    format!("pure method `{method}` assigns global `{}`", v.name),
                )),
                TLValue::Index(v, span, _) if v.scope != Scope::Local => out.push(Diagnostic::error(
                    codes::PURITY_SIDE_EFFECT,
                    *span,
                    format!("pure method `{method}` writes elements of non-local array `{}`", v.name),
                )),
                _ => {}
            },
            TStmtKind::Call { target, callee, .. } => {
                if let Some(TLValue::Var(v, span) | TLValue::Index(v, span, _)) = target {
                    if v.scope != Scope::Local {
                        out.push(Diagnostic::error(
                            codes::PURITY_SIDE_EFFECT,
                            *span,
                            format!("pure method `{method}` assigns non-local `{}`", v.name),
                        ));
                    }
                }
                if !p.method(callee).is_some_and(|m| m.pure) {
                    out.push(Diagnostic::error(
                        codes::PURITY_SIDE_EFFECT,
                        s.span,
                        format!("pure method `{method}` calls non-pure method `{callee}`"),
                    ));
                }
            }
            TStmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                side_effects(p, then_branch, out, method);
                side_effects(p, else_branch, out, method);
            }
            TStmtKind::While { body, .. } => side_effects(p, body, out, method),
            TStmtKind::Block(b) => side_effects(p, b, out, method),
            _ => {}
        }
    }
}

/// PURITY001 for non-pure calls in specifications, PURITY002 for side
/// effects in pure method bodies.
pub fn check_spec_purity(p: &TypedProgram) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut specs: Vec<&TExpr> = p.invariants.iter().map(|i| &i.expr).collect();
    for m in &p.methods {
        specs.extend(m.requires.iter());
        specs.extend(m.ensures.iter());
        if let Some(refs) = &m.assignable {
            for r in refs {
                if let TStoreRef::Range(_, lo, hi, _) = r {
                    specs.push(lo);
                    specs.push(hi);
                }
            }
        }
        if let Some(body) = &m.body {
            spec_exprs_in_body(body, &mut specs);
        }
    }
    let mut calls = Vec::new();
    for e in specs {
        calls_in(e, &mut calls);
    }
    for (name, span) in calls {
        if !p.method(&name).is_some_and(|m| m.pure) {
            diags.push(Diagnostic::error(
                codes::PURITY_CALL_IN_SPEC,
                span,
                format!("specification calls non-pure method `{name}`"),
            ));
        }
    }
    for m in p.methods.iter().filter(|m| m.pure) {
        if let Some(body) = &m.body {
            side_effects(p, body, &mut diags, &m.name);
        }
    }
    diags
}

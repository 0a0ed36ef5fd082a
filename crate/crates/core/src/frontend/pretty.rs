//! Source printer for the untyped AST. Binary and unary operands are fully
//! parenthesized so printing then reparsing preserves tree shape.

use std::fmt::Write;

use super::ast::*;

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for g in &p.globals {
        let _ = writeln!(out, "var {}: {};", g.name.name, type_str(&g.ty));
    }
    for inv in &p.invariants {
        let _ = writeln!(out, "//@ invariant {};", expr_str(&inv.expr));
    }
    for m in &p.methods {
        out.push('\n');
        if m.pure {
            out.push_str("//@ pure\n");
        }
        for clause in &m.specs {
            match clause {
                SpecClause::Requires(e) => {
                    let _ = writeln!(out, "//@ requires {};", expr_str(e));
                }
                SpecClause::Ensures(e) => {
                    let _ = writeln!(out, "//@ ensures {};", expr_str(e));
                }
                SpecClause::Assignable(refs, _) => {
                    let refs: Vec<_> = refs.iter().map(store_ref_str).collect();
                    let _ = writeln!(out, "//@ assignable {};", refs.join(", "));
                }
            }
        }
        let params: Vec<_> = m
            .params
            .iter()
            .map(|p| format!("{}: {}", p.name.name, type_str(&p.ty)))
            .collect();
        let _ = write!(out, "method {}({})", m.name.name, params.join(", "));
        if let Some(r) = &m.ret {
            let _ = write!(out, ": {}", type_str(r));
        }
        match &m.body {
            None => out.push_str(";\n"),
            Some(b) => {
                out.push(' ');
                block(&mut out, b, 0);
                out.push('\n');
            }
        }
    }
    out
}

pub fn type_str(t: &TypeRef) -> String {
    let base = match t.base {
        BaseType::Int => "int",
        BaseType::Bool => "bool",
        BaseType::IntArray => "int[]",
    };
    if t.nullable {
        format!("nullable {base}")
    } else {
        base.to_string()
    }
}

fn store_ref_str(r: &StoreRef) -> String {
    match r {
        StoreRef::Everything(_) => "\\everything".into(),
        StoreRef::Nothing(_) => "\\nothing".into(),
        StoreRef::Name(id) => id.name.clone(),
        StoreRef::AllElements(id) => format!("{}[*]", id.name),
        StoreRef::Range(id, lo, hi) => format!("{}[{} .. {}]", id.name, expr_str(lo), expr_str(hi)),
    }
}

pub fn expr_str(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Null => "null".into(),
        ExprKind::Var(name) => name.clone(),
        ExprKind::Result => "\\result".into(),
        ExprKind::Unary(UnaryOp::Neg, a) => format!("(-{})", expr_str(a)),
        ExprKind::Unary(UnaryOp::Not, a) => format!("(!{})", expr_str(a)),
        ExprKind::Binary(op, a, b) => format!("({} {} {})", expr_str(a), op.symbol(), expr_str(b)),
        ExprKind::Index(a, i) => format!("{}[{}]", expr_str(a), expr_str(i)),
        ExprKind::Length(a) => format!("{}.length", expr_str(a)),
        ExprKind::Old(a) => format!("old({})", expr_str(a)),
        ExprKind::Call(f, args) => {
            let args: Vec<_> = args.iter().map(expr_str).collect();
            format!("{}({})", f.name, args.join(", "))
        }
        ExprKind::Quant(q, v, body) => {
            let kw = match q {
                Quantifier::Forall => "\\forall",
                Quantifier::Exists => "\\exists",
            };
            format!("({kw} int {}; {})", v.name, expr_str(body))
        }
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn block(out: &mut String, b: &Block, level: usize) {
    out.push_str("{\n");
    for s in &b.stmts {
        stmt(out, s, level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn lvalue_str(l: &LValue) -> String {
    match l {
        LValue::Var(id) => id.name.clone(),
        LValue::Index(id, i) => format!("{}[{}]", id.name, expr_str(i)),
    }
}

fn stmt(out: &mut String, s: &Stmt, level: usize) {
    match &s.kind {
        StmtKind::While {
            cond,
            invariants,
            decreases,
            body,
        } => {
            for inv in invariants {
                indent(out, level);
                let _ = writeln!(out, "//@ invariant {};", expr_str(inv));
            }
            if let Some(d) = decreases {
                indent(out, level);
                let _ = writeln!(out, "//@ decreases {};", expr_str(d));
            }
            indent(out, level);
            let _ = write!(out, "while ({}) ", expr_str(cond));
            block(out, body, level);
            out.push('\n');
        }
        _ => {
            indent(out, level);
            match &s.kind {
                StmtKind::VarDecl { name, ty, init } => {
                    let _ = write!(out, "var {}: {} := {};", name.name, type_str(ty), expr_str(init));
                }
                StmtKind::Assign { target, value } => {
                    let _ = write!(out, "{} := {};", lvalue_str(target), expr_str(value));
                }
                StmtKind::Call { target, callee, args } => {
                    let args: Vec<_> = args.iter().map(expr_str).collect();
                    if let Some(t) = target {
                        let _ = write!(out, "{} := ", lvalue_str(t));
                    }
                    let _ = write!(out, "{}({});", callee.name, args.join(", "));
                }
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    let _ = write!(out, "if ({}) ", expr_str(cond));
                    block(out, then_branch, level);
                    if let Some(e) = else_branch {
                        out.push_str(" else ");
                        block(out, e, level);
                    }
                }
                StmtKind::Return(None) => out.push_str("return;"),
                StmtKind::Return(Some(e)) => {
                    let _ = write!(out, "return {};", expr_str(e));
                }
                StmtKind::Assert(e) => {
                    let _ = write!(out, "//@ assert {};", expr_str(e));
                }
                StmtKind::Assume(e) => {
                    let _ = write!(out, "//@ assume {};", expr_str(e));
                }
                StmtKind::Block(b) => block(out, b, level),
                StmtKind::While { .. } => unreachable!(),
            }
            out.push('\n');
        }
    }
}

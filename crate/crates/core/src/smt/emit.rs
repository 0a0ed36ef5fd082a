//! SMT-LIB v2 printing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use num_bigint::Sign;

use crate::ir::{BinaryOp, Quantifier, Sort, Term};
use crate::vcgen::FnSig;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("symbols `{0}` and `{1}` collide after sanitization")]
    Collision(String, String),
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("term cannot be printed: {0}")]
    Unsupported(String),
}

const WRAP32: &str = "(define-fun wrap32 ((x Int)) Int (- (mod (+ x 2147483648) 4294967296) 2147483648))";
const JDIV: &str = "(define-fun jdiv ((a Int) (b Int)) Int \
(ite (= (>= a 0) (> b 0)) (div (abs a) (abs b)) (- (div (abs a) (abs b)))))";
const JMOD: &str = "(define-fun jmod ((a Int) (b Int)) Int (ite (>= a 0) (mod a (abs b)) (- (mod (- a) (abs b)))))";

fn simple_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
}

pub fn sanitize(name: &str) -> String {
    let mut s: String = name.chars().map(|c| if simple_char(c) { c } else { '_' }).collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
        s.insert(0, 'v');
    }
    s
}

pub fn fn_symbol(name: &str) -> String {
    format!("fn.{}", sanitize(name))
}

/// Logical symbol to SMT-LIB symbol, and back.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolMap {
    pub to_smt: BTreeMap<String, String>,
    pub from_smt: BTreeMap<String, String>,
    pub sorts: BTreeMap<String, Sort>,
}

impl SymbolMap {
    pub fn build(symbols: &[(String, Sort)]) -> Result<SymbolMap, EmitError> {
        let mut m = SymbolMap::default();
        for (s, sort) in symbols {
            if m.to_smt.contains_key(s) {
                continue;
            }
            let smt = sanitize(s);
            if let Some(prev) = m.from_smt.get(&smt) {
                return Err(EmitError::Collision(prev.clone(), s.clone()));
            }
            m.to_smt.insert(s.clone(), smt.clone());
            m.from_smt.insert(smt, s.clone());
            m.sorts.insert(s.clone(), *sort);
        }
        Ok(m)
    }

    pub fn smt(&self, s: &str) -> Result<&str, EmitError> {
        self.to_smt
            .get(s)
            .map(String::as_str)
            .ok_or_else(|| EmitError::Undeclared(s.to_string()))
    }
}

fn int_lit(v: &num_bigint::BigInt) -> String {
    match v.sign() {
        Sign::Minus => format!("(- {})", v.magnitude()),
        _ => v.to_string(),
    }
}

pub fn term_to_smt(t: &Term, names: &SymbolMap) -> Result<String, EmitError> {
    let mut out = String::new();
    write_term(t, names, &mut out)?;
    Ok(out)
}

fn write_term(t: &Term, names: &SymbolMap, out: &mut String) -> Result<(), EmitError> {
    let app = |out: &mut String, head: &str, args: &[&Term]| -> Result<(), EmitError> {
        write!(out, "({head}").unwrap();
        for a in args {
            out.push(' ');
            write_term(a, names, out)?;
        }
        out.push(')');
        Ok(())
    };
    match t {
        Term::Int(v) => out.push_str(&int_lit(v)),
        Term::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Term::Var(v) => out.push_str(names.smt(v)?),
        Term::Bound(v) => write!(out, "q!{}", sanitize(v)).unwrap(),
        Term::Not(a) => app(out, "not", &[a])?,
        Term::Neg(a) => app(out, "-", &[a])?,
        Term::Wrap32(a) => app(out, "wrap32", &[a])?,
        Term::Select(a, i) => app(out, "select", &[a, i])?,
        Term::Store(a, i, v) => app(out, "store", &[a, i, v])?,
        Term::Ite(c, a, b) => app(out, "ite", &[c, a, b])?,
        Term::Bin(BinaryOp::Ne, a, b) => {
            out.push_str("(not ");
            app(out, "=", &[a, b])?;
            out.push(')');
        }
        Term::Bin(op, a, b) => {
            let head = match op {
                BinaryOp::Add => "+",
                BinaryOp::Sub => "-",
                BinaryOp::Mul => "*",
                BinaryOp::Div => "jdiv",
                BinaryOp::Mod => "jmod",
                BinaryOp::Lt => "<",
                BinaryOp::Le => "<=",
                BinaryOp::Gt => ">",
                BinaryOp::Ge => ">=",
                BinaryOp::Eq => "=",
                BinaryOp::And => "and",
                BinaryOp::Or => "or",
                BinaryOp::Implies => "=>",
                BinaryOp::Ne => unreachable!(),
            };
            app(out, head, &[a, b])?
        }
        Term::Quant(q, v, body) => {
            let kw = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            write!(out, "({kw} ((q!{} Int)) ", sanitize(v)).unwrap();
            write_term(body, names, out)?;
            out.push(')');
        }
        Term::App(f, args) => {
            if args.is_empty() {
                out.push_str(&fn_symbol(f));
            } else {
                let refs: Vec<&Term> = args.iter().collect();
                app(out, &fn_symbol(f), &refs)?
            }
        }
        Term::Len(_) | Term::IsNull(_) | Term::Old(..) => return Err(EmitError::Unsupported(t.to_string())),
    }
    Ok(())
}

#[derive(Debug, Default, Clone, Copy)]
struct Features {
    wrap32: bool,
    jdiv: bool,
    jmod: bool,
    nonlinear: bool,
}

fn scan(t: &Term, f: &mut Features, apps: &mut BTreeSet<String>) {
    f.nonlinear |= t.uses_nonlinear();
    t.walk(&mut |t| match t {
        Term::Wrap32(_) => f.wrap32 = true,
        Term::Bin(BinaryOp::Div, ..) => f.jdiv = true,
        Term::Bin(BinaryOp::Mod, ..) => f.jmod = true,
        Term::App(n, _) => {
            apps.insert(n.clone());
        }
        _ => {}
    });
}

/// A problem to print: declared symbols, optional definitions
/// `(assert (= sym term))`, and plain assertions.
#[derive(Debug, Clone, Default)]
pub struct Problem {
    pub symbols: Vec<(String, Sort)>,
    pub definitions: Vec<(String, Term)>,
    pub assertions: Vec<Term>,
}

/// A printed script split into the part that sets up the problem
/// (`prelude`) and the goal assertions, so sessions can add commands in
/// between.
#[derive(Debug, Clone)]
pub struct Script {
    pub logic: String,
    pub prelude: String,
    pub goals: Vec<String>,
    pub names: SymbolMap,
}

impl Script {
    /// Self-contained script ending in `check-sat`.
    pub fn text(&self) -> String {
        let mut s = self.prelude.clone();
        for g in &self.goals {
            writeln!(s, "(assert {g})").unwrap();
        }
        s.push_str("(check-sat)\n");
        s
    }

    pub fn term(&self, t: &Term) -> Result<String, EmitError> {
        term_to_smt(t, &self.names)
    }
}

pub fn emit_problem(p: &Problem, fns: &[FnSig], logic: Option<&str>) -> Result<Script, EmitError> {
    let names = SymbolMap::build(&p.symbols)?;
    let mut feats = Features::default();
    let mut apps = BTreeSet::new();
    for (_, t) in &p.definitions {
        scan(t, &mut feats, &mut apps);
    }
    for t in &p.assertions {
        scan(t, &mut feats, &mut apps);
    }
    let logic = logic.map(str::to_string).unwrap_or_else(|| {
        if feats.nonlinear {
            "AUFNIA".to_string()
        } else {
            "AUFLIA".to_string()
        }
    });
    let mut s = String::new();
    s.push_str("(set-option :produce-models true)\n");
    writeln!(s, "(set-logic {logic})").unwrap();
    if feats.wrap32 {
        writeln!(s, "{WRAP32}").unwrap();
    }
    if feats.jdiv {
        writeln!(s, "{JDIV}").unwrap();
    }
    if feats.jmod {
        writeln!(s, "{JMOD}").unwrap();
    }
    for f in fns.iter().filter(|f| apps.contains(&f.name)) {
        let args: Vec<String> = f.args.iter().map(|a| a.to_string()).collect();
        writeln!(s, "(declare-fun {} ({}) {})", fn_symbol(&f.name), args.join(" "), f.ret).unwrap();
    }
    let mut declared = BTreeSet::new();
    for (sym, sort) in &p.symbols {
        if declared.insert(sym) {
            writeln!(s, "(declare-fun {} () {sort})", names.smt(sym)?).unwrap();
        }
    }
    for (sym, t) in &p.definitions {
        writeln!(s, "(assert (= {} {}))", names.smt(sym)?, term_to_smt(t, &names)?).unwrap();
    }
    let goals = p
        .assertions
        .iter()
        .map(|t| term_to_smt(t, &names))
        .collect::<Result<_, _>>()?;
    Ok(Script {
        logic,
        prelude: s,
        goals,
        names,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_literals_and_disequality() {
        let names = SymbolMap::build(&[("x_0".into(), Sort::Int)]).unwrap();
        let t = Term::bin(BinaryOp::Ne, Term::var("x_0"), Term::int(-5));
        assert_eq!(term_to_smt(&t, &names).unwrap(), "(not (= x_0 (- 5)))");
    }

    #[test]
    fn java_mode_defines_wrap32() {
        let p = Problem {
            symbols: vec![("a_0".into(), Sort::Int), ("b_0".into(), Sort::Int)],
            definitions: vec![],
            assertions: vec![Term::eq(
                Term::Wrap32(Box::new(Term::bin(BinaryOp::Add, Term::var("a_0"), Term::var("b_0")))),
                Term::int(0),
            )],
        };
        let s = emit_problem(&p, &[], None).unwrap();
        assert!(s.prelude.contains("(define-fun wrap32"));
        assert!(s.text().contains("(wrap32 (+ a_0 b_0))"));
        assert_eq!(s.logic, "AUFNIA");
    }

    #[test]
    fn collisions_are_reported() {
        let r = SymbolMap::build(&[("a#1".into(), Sort::Int), ("a_1".into(), Sort::Int)]);
        assert!(matches!(r, Err(EmitError::Collision(..))));
    }

    #[test]
    fn emission_is_deterministic() {
        let p = Problem {
            symbols: vec![("x_0".into(), Sort::Int)],
            definitions: vec![("blk!0".into(), Term::lt(Term::var("x_0"), Term::int(3)))],
            assertions: vec![Term::not(Term::var("blk!0"))],
        };
        let mut p2 = p.clone();
        p2.symbols.push(("blk!0".into(), Sort::Bool));
        let a = emit_problem(&p2, &[], None).unwrap().text();
        let b = emit_problem(&p2, &[], None).unwrap().text();
        assert_eq!(a, b);
        assert!(a.contains("(set-logic AUFLIA)"));
    }
}

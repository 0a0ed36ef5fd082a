//! Untyped syntax tree of a MiniJML compilation unit.

use num_bigint::BigInt;

use crate::source::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseType {
    Int,
    Bool,
    IntArray,
}

/// A declared type together with the nullable marker (meaningful for arrays only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeRef {
    pub base: BaseType,
    pub nullable: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Implies,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
            And => "&&",
            Or => "||",
            Implies => "==>",
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinaryOp::And | BinaryOp::Or | BinaryOp::Implies)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    Bool(bool),
    /// Only valid as an operand of `==`/`!=` against an array.
    Null,
    Var(String),
    Result,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Length(Box<Expr>),
    Old(Box<Expr>),
    Call(Ident, Vec<Expr>),
    Quant(Quantifier, Ident, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }
}

/// Location named by an assignable clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StoreRef {
    Everything(Span),
    Nothing(Span),
    Name(Ident),
    AllElements(Ident),
    Range(Ident, Expr, Expr),
}

impl StoreRef {
    pub fn span(&self) -> Span {
        match self {
            StoreRef::Everything(s) | StoreRef::Nothing(s) => *s,
            StoreRef::Name(id) | StoreRef::AllElements(id) => id.span,
            StoreRef::Range(id, _, hi) => id.span.to(hi.span),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecClause {
    Requires(Expr),
    Ensures(Expr),
    Assignable(Vec<StoreRef>, Span),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: Ident,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: Ident,
    pub params: Vec<Param>,
    pub ret: Option<TypeRef>,
    pub pure: bool,
    pub specs: Vec<SpecClause>,
    pub body: Option<Block>,
    pub span: Span,
}

impl MethodDecl {
    pub fn requires(&self) -> impl Iterator<Item = &Expr> {
        self.specs.iter().filter_map(|c| match c {
            SpecClause::Requires(e) => Some(e),
            _ => None,
        })
    }

    pub fn ensures(&self) -> impl Iterator<Item = &Expr> {
        self.specs.iter().filter_map(|c| match c {
            SpecClause::Ensures(e) => Some(e),
            _ => None,
        })
    }

    pub fn assignable(&self) -> Option<&[StoreRef]> {
        self.specs.iter().find_map(|c| match c {
            SpecClause::Assignable(refs, _) => Some(refs.as_slice()),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LValue {
    Var(Ident),
    Index(Ident, Expr),
}

impl LValue {
    pub fn root(&self) -> &Ident {
        match self {
            LValue::Var(id) | LValue::Index(id, _) => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    VarDecl {
        name: Ident,
        ty: TypeRef,
        init: Expr,
    },
    Assign {
        target: LValue,
        value: Expr,
    },
    /// Call statement; `target` receives the result when present.
    Call {
        target: Option<LValue>,
        callee: Ident,
        args: Vec<Expr>,
    },
    If {
        cond: Expr,
        then_branch: Block,
        else_branch: Option<Block>,
    },
    While {
        cond: Expr,
        invariants: Vec<Expr>,
        decreases: Option<Expr>,
        body: Block,
    },
    Return(Option<Expr>),
    Assert(Expr),
    Assume(Expr),
    Block(Block),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDecl {
    pub name: Ident,
    pub ty: TypeRef,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalInvariant {
    pub expr: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub globals: Vec<GlobalDecl>,
    pub invariants: Vec<GlobalInvariant>,
    pub methods: Vec<MethodDecl>,
}

impl Program {
    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.name.name == name)
    }
}

/// Overwrite every span with the default; used to compare trees structurally.
pub fn clear_spans(p: &mut Program) {
    fn ident(i: &mut Ident) {
        i.span = Span::default();
    }
    fn ty(t: &mut TypeRef) {
        t.span = Span::default();
    }
    fn expr(e: &mut Expr) {
        e.span = Span::default();
        match &mut e.kind {
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Null | ExprKind::Var(_) | ExprKind::Result => {}
            ExprKind::Unary(_, a) | ExprKind::Length(a) | ExprKind::Old(a) => expr(a),
            ExprKind::Binary(_, a, b) | ExprKind::Index(a, b) => {
                expr(a);
                expr(b);
            }
            ExprKind::Call(name, args) => {
                ident(name);
                args.iter_mut().for_each(expr);
            }
            ExprKind::Quant(_, v, body) => {
                ident(v);
                expr(body);
            }
        }
    }
    fn lvalue(l: &mut LValue) {
        match l {
            LValue::Var(id) => ident(id),
            LValue::Index(id, e) => {
                ident(id);
                expr(e);
            }
        }
    }
    fn block(b: &mut Block) {
        b.span = Span::default();
        b.stmts.iter_mut().for_each(stmt);
    }
    fn stmt(s: &mut Stmt) {
        s.span = Span::default();
        match &mut s.kind {
            StmtKind::VarDecl { name, ty: t, init } => {
                ident(name);
                ty(t);
                expr(init);
            }
            StmtKind::Assign { target, value } => {
                lvalue(target);
                expr(value);
            }
            StmtKind::Call { target, callee, args } => {
                if let Some(t) = target {
                    lvalue(t);
                }
                ident(callee);
                args.iter_mut().for_each(expr);
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                expr(cond);
                block(then_branch);
                if let Some(b) = else_branch {
                    block(b);
                }
            }
            StmtKind::While {
                cond,
                invariants,
                decreases,
                body,
            } => {
                expr(cond);
                invariants.iter_mut().for_each(expr);
                if let Some(d) = decreases {
                    expr(d);
                }
                block(body);
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    expr(e);
                }
            }
            StmtKind::Assert(e) | StmtKind::Assume(e) => expr(e),
            StmtKind::Block(b) => block(b),
        }
    }
    for g in &mut p.globals {
        ident(&mut g.name);
        ty(&mut g.ty);
        g.span = Span::default();
    }
    for inv in &mut p.invariants {
        expr(&mut inv.expr);
        inv.span = Span::default();
    }
    for m in &mut p.methods {
        ident(&mut m.name);
        m.span = Span::default();
        for prm in &mut m.params {
            ident(&mut prm.name);
            ty(&mut prm.ty);
        }
        if let Some(r) = &mut m.ret {
            ty(r);
        }
        for c in &mut m.specs {
            match c {
                SpecClause::Requires(e) | SpecClause::Ensures(e) => expr(e),
                SpecClause::Assignable(refs, sp) => {
                    *sp = Span::default();
                    for r in refs {
                        match r {
                            StoreRef::Everything(s) | StoreRef::Nothing(s) => *s = Span::default(),
                            StoreRef::Name(id) | StoreRef::AllElements(id) => ident(id),
                            StoreRef::Range(id, lo, hi) => {
                                ident(id);
                                expr(lo);
                                expr(hi);
                            }
                        }
                    }
                }
            }
        }
        if let Some(b) = &mut m.body {
            block(b);
        }
    }
}

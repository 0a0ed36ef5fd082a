//! Resolved and typed program representation.

use std::fmt;

use num_bigint::BigInt;

use crate::frontend::ast::{BaseType, BinaryOp, Quantifier, UnaryOp};
use crate::source::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    IntArray,
}

impl From<BaseType> for Type {
    fn from(b: BaseType) -> Self {
        match b {
            BaseType::Int => Type::Int,
            BaseType::Bool => Type::Bool,
            BaseType::IntArray => Type::IntArray,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Int => "int",
            Type::Bool => "bool",
            Type::IntArray => "int[]",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    Global,
    Param,
    Local,
    Bound,
}

/// A resolved variable occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub name: String,
    pub scope: Scope,
    pub ty: Type,
    /// Effective nullity; only meaningful for arrays.
    pub nullable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TExpr {
    pub kind: TExprKind,
    pub ty: Type,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TExprKind {
    Int(BigInt),
    Bool(bool),
    Var(VarRef),
    Result,
    Unary(UnaryOp, Box<TExpr>),
    Binary(BinaryOp, Box<TExpr>, Box<TExpr>),
    Index(Box<TExpr>, Box<TExpr>),
    Length(Box<TExpr>),
    IsNull(Box<TExpr>),
    Old(Box<TExpr>),
    Call(String, Vec<TExpr>),
    Quant(Quantifier, String, Box<TExpr>),
}

impl TExpr {
    /// Visit every sub-expression in pre-order.
    pub fn walk(&self, f: &mut dyn FnMut(&TExpr)) {
        f(self);
        match &self.kind {
            TExprKind::Int(_) | TExprKind::Bool(_) | TExprKind::Var(_) | TExprKind::Result => {}
            TExprKind::Unary(_, a)
            | TExprKind::Length(a)
            | TExprKind::IsNull(a)
            | TExprKind::Old(a)
            | TExprKind::Quant(_, _, a) => a.walk(f),
            TExprKind::Binary(_, a, b) | TExprKind::Index(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            TExprKind::Call(_, args) => args.iter().for_each(|a| a.walk(f)),
        }
    }

    pub fn has_quantifier(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e.kind, TExprKind::Quant(..)));
        found
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TLValue {
    Var(VarRef, Span),
    Index(VarRef, Span, TExpr),
}

impl TLValue {
    pub fn var(&self) -> &VarRef {
        match self {
            TLValue::Var(v, _) | TLValue::Index(v, _, _) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TStmt {
    pub kind: TStmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TStmtKind {
    /// Local declaration; `init` is `None` when the initializer is a call
    /// (lowered to a following `Call` statement).
    VarDecl {
        var: VarRef,
        init: Option<TExpr>,
    },
    Assign {
        target: TLValue,
        value: TExpr,
    },
    Call {
        target: Option<TLValue>,
        callee: String,
        args: Vec<TExpr>,
    },
    If {
        cond: TExpr,
        then_branch: Vec<TStmt>,
        else_branch: Vec<TStmt>,
    },
    While {
        cond: TExpr,
        invariants: Vec<TExpr>,
        decreases: Option<TExpr>,
        body: Vec<TStmt>,
    },
    Return(Option<TExpr>),
    Assert(TExpr),
    Assume(TExpr),
    Block(Vec<TStmt>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TStoreRef {
    Everything(Span),
    Nothing(Span),
    Name(VarRef, Span),
    AllElements(VarRef, Span),
    Range(VarRef, TExpr, TExpr, Span),
}

impl TStoreRef {
    pub fn span(&self) -> Span {
        match self {
            TStoreRef::Everything(s)
            | TStoreRef::Nothing(s)
            | TStoreRef::Name(_, s)
            | TStoreRef::AllElements(_, s)
            | TStoreRef::Range(_, _, _, s) => *s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TParam {
    pub name: String,
    pub ty: Type,
    pub nullable: bool,
    pub span: Span,
}

impl TParam {
    pub fn var_ref(&self) -> VarRef {
        VarRef {
            name: self.name.clone(),
            scope: Scope::Param,
            ty: self.ty,
            nullable: self.nullable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TGlobal {
    pub name: String,
    pub ty: Type,
    pub nullable: bool,
    pub span: Span,
}

impl TGlobal {
    pub fn var_ref(&self) -> VarRef {
        VarRef {
            name: self.name.clone(),
            scope: Scope::Global,
            ty: self.ty,
            nullable: self.nullable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TInvariant {
    pub expr: TExpr,
    pub span: Span,
}

/// Implicit `x != null` constraint produced by the non-null default.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NonNullFact {
    pub var: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMethod {
    pub name: String,
    pub name_span: Span,
    pub params: Vec<TParam>,
    /// Return type and nullity.
    pub ret: Option<(Type, bool)>,
    pub pure: bool,
    pub requires: Vec<TExpr>,
    pub ensures: Vec<TExpr>,
    pub assignable: Option<Vec<TStoreRef>>,
    pub body: Option<Vec<TStmt>>,
    pub span: Span,
    /// Filled by `apply_nullity_defaults`.
    pub implicit_nonnull: Vec<NonNullFact>,
}

impl TMethod {
    pub fn param(&self, name: &str) -> Option<&TParam> {
        self.params.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypedProgram {
    pub globals: Vec<TGlobal>,
    pub invariants: Vec<TInvariant>,
    pub methods: Vec<TMethod>,
    /// Non-null constraints on globals, assumed at every method entry.
    pub implicit_global_nonnull: Vec<NonNullFact>,
    pub nullity_applied: bool,
}

impl TypedProgram {
    pub fn method(&self, name: &str) -> Option<&TMethod> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn global(&self, name: &str) -> Option<&TGlobal> {
        self.globals.iter().find(|g| g.name == name)
    }
}

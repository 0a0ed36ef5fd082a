//! Guarded-command form of a method.

use std::fmt;

use serde::Serialize;

use crate::arith::ArithmeticMode;
use crate::ir::{Sort, Term};
use crate::source::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AssertKind {
    Precondition,
    Postcondition,
    LoopInvEntry,
    LoopInvPreserved,
    DecreasesBound,
    DecreasesDecrease,
    CallPre,
    WellDefinedness,
    Overflow,
    NullDeref,
    IndexBounds,
    DivZero,
    ExplicitAssert,
    GlobalInvariant,
    Frame,
}

impl AssertKind {
    pub fn as_str(self) -> &'static str {
        use AssertKind::*;
        match self {
            Precondition => "Precondition",
            Postcondition => "Postcondition",
            LoopInvEntry => "LoopInvEntry",
            LoopInvPreserved => "LoopInvPreserved",
            DecreasesBound => "DecreasesBound",
            DecreasesDecrease => "DecreasesDecrease",
            CallPre => "CallPre",
            WellDefinedness => "WellDefinedness",
            Overflow => "Overflow",
            NullDeref => "NullDeref",
            IndexBounds => "IndexBounds",
            DivZero => "DivZero",
            ExplicitAssert => "ExplicitAssert",
            GlobalInvariant => "GlobalInvariant",
            Frame => "Frame",
        }
    }

    /// Short explanation for reports.
    pub fn describe(self) -> &'static str {
        use AssertKind::*;
        match self {
            Precondition => "precondition might not hold",
            Postcondition => "postcondition might not hold",
            LoopInvEntry => "loop invariant might not hold on entry",
            LoopInvPreserved => "loop invariant might not be preserved",
            DecreasesBound => "loop variant might be negative",
            DecreasesDecrease => "loop variant might not decrease",
            CallPre => "precondition of the callee might not hold",
            WellDefinedness => "specification might be undefined",
            Overflow => "arithmetic might overflow",
            NullDeref => "array might be null",
            IndexBounds => "index might be out of bounds",
            DivZero => "divisor might be zero",
            ExplicitAssert => "assertion might not hold",
            GlobalInvariant => "global invariant might not hold",
            Frame => "assignable clause might be violated",
        }
    }
}

impl fmt::Display for AssertKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Identity of a check independent of weave order, used by the direct
/// interpreter to find ordinals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssertionKey {
    pub kind: AssertKind,
    pub span: Span,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertionInfo {
    pub ordinal: usize,
    pub kind: AssertKind,
    pub span: Span,
    pub detail: String,
}

impl AssertionInfo {
    pub fn key(&self) -> AssertionKey {
        AssertionKey {
            kind: self.kind,
            span: self.span,
            detail: self.detail.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AssertionId {
    pub method: String,
    pub ordinal: usize,
}

impl fmt::Display for AssertionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.method, self.ordinal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRole {
    Param,
    Global,
    Local,
    Result,
    Temp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    /// Unique name within the body.
    pub name: String,
    /// Name as written in the source (temps use their own name).
    pub source: String,
    pub sort: Sort,
    pub role: VarRole,
    /// Arrays only: may hold null.
    pub nullable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OriginKind {
    Entry,
    Requires,
    Invariant,
    Stmt,
    Call,
    Loop,
    Ensures,
    Frame,
    Exit,
}

/// Source position a command was produced from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Origin {
    pub span: Span,
    pub kind: OriginKind,
}

impl Origin {
    pub fn new(span: Span, kind: OriginKind) -> Self {
        Origin { span, kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssumeRole {
    NonNull,
    Range,
    Invariant,
    Requires,
    /// User `assume` statement.
    Stmt,
    /// Callee postcondition or frame at a call site.
    CallPost,
    /// Loop invariant after the havoc.
    LoopInv,
    /// Instantiated contract of a pure method used in a specification.
    Axiom,
    /// End of a cut loop body.
    LoopBack(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lhs {
    Var(String),
    Elem(String, Term),
}

impl Lhs {
    pub fn var(&self) -> &str {
        match self {
            Lhs::Var(v) | Lhs::Elem(v, _) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HavocTarget {
    pub name: String,
    /// Arrays only: keep length and nullness, forget contents.
    pub elements_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HavocSite {
    Loop(usize),
    Call(usize),
}

impl fmt::Display for HavocSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HavocSite::Loop(k) => write!(f, "loop#{k}"),
            HavocSite::Call(k) => write!(f, "call#{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cmd {
    Assume {
        term: Term,
        role: AssumeRole,
        origin: Origin,
    },
    Assert {
        term: Term,
        id: usize,
        origin: Origin,
    },
    Assign {
        lhs: Lhs,
        value: Term,
        origin: Origin,
    },
    Havoc {
        targets: Vec<HavocTarget>,
        site: HavocSite,
        origin: Origin,
    },
    If {
        cond: Term,
        then_cmds: Vec<Cmd>,
        else_cmds: Vec<Cmd>,
        origin: Origin,
    },
    Snapshot {
        tag: String,
    },
    /// Jump to the exit section.
    Return {
        origin: Origin,
    },
}

/// Everything needed to execute a call site concretely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    pub index: usize,
    pub callee: String,
    pub span: Span,
    /// Callee parameter name bound to a caller term (temp or array variable).
    pub bindings: Vec<(String, Term)>,
    /// Callee array parameter copied back into a caller array variable.
    pub copy_out: Vec<(String, String)>,
    pub result: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedBody {
    pub method: String,
    pub mode: ArithmeticMode,
    pub vars: Vec<VarInfo>,
    pub cmds: Vec<Cmd>,
    /// Shared exit section reached by every return and by fall-through.
    pub exit: Vec<Cmd>,
    pub assertions: Vec<AssertionInfo>,
    pub calls: Vec<CallSite>,
    pub loop_count: usize,
}

impl GuardedBody {
    pub fn var(&self, name: &str) -> Option<&VarInfo> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn assertion_id(&self, ordinal: usize) -> AssertionId {
        AssertionId {
            method: self.method.clone(),
            ordinal,
        }
    }

    pub fn ordinal_of(&self, key: &AssertionKey) -> Option<usize> {
        self.assertions.iter().find(|a| a.key() == *key).map(|a| a.ordinal)
    }

    /// Visit every command, including nested branches, in textual order.
    pub fn for_each_cmd(&self, f: &mut dyn FnMut(&Cmd)) {
        fn go(cmds: &[Cmd], f: &mut dyn FnMut(&Cmd)) {
            for c in cmds {
                f(c);
                if let Cmd::If {
                    then_cmds, else_cmds, ..
                } = c
                {
                    go(then_cmds, f);
                    go(else_cmds, f);
                }
            }
        }
        go(&self.cmds, f);
        go(&self.exit, f);
    }
}

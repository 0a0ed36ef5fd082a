//! Runtime assertion checking: concrete execution of woven bodies.
//!
//! Two interpreters are provided. [`Rac::run`] executes the guarded-command
//! body produced by weaving, so checks fire exactly where the verifier
//! places assertions. [`Rac::run_direct`] walks the typed AST and
//! evaluates contracts on the fly; it exists to cross-check the weaver.

pub mod direct;
pub mod eval;
pub mod exhaustive;
pub mod woven;

use std::cell::Cell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;

pub use exhaustive::{exhaustive_test, ExhaustiveReport, InputRanges};

use crate::arith::ArithmeticMode;
use crate::driver::trace::CounterexampleTrace;
use crate::ir::Sort;
use crate::source::Span;
use crate::typecheck::{TGlobal, Type, TypedProgram};
use crate::value::Val;
use crate::weave::{weave_method, AssertKind, AssertionId, GuardedBody, WeaveError};

/// Default number of interpreter steps per top-level run.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Nested call depth at which execution gives up.
pub const MAX_CALL_DEPTH: usize = 48;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunResult {
    Normal(Option<Val>),
    ContractViolation {
        id: AssertionId,
        kind: AssertKind,
        span: Span,
    },
    RuntimeError {
        message: String,
        span: Option<Span>,
    },
    NotExecutable {
        message: String,
        span: Option<Span>,
    },
    /// An assumption (precondition, `assume`, non-null default) was false.
    NotApplicable,
}

impl RunResult {
    pub fn label(&self) -> &'static str {
        match self {
            RunResult::Normal(_) => "normal",
            RunResult::ContractViolation { .. } => "contract-violation",
            RunResult::RuntimeError { .. } => "runtime-error",
            RunResult::NotExecutable { .. } => "not-executable",
            RunResult::NotApplicable => "not-applicable",
        }
    }

    /// Same outcome up to diagnostic messages and spans.
    pub fn agrees_with(&self, other: &RunResult) -> bool {
        match (self, other) {
            (RunResult::Normal(a), RunResult::Normal(b)) => a == b,
            (RunResult::ContractViolation { id: a, .. }, RunResult::ContractViolation { id: b, .. }) => a == b,
            _ => self.label() == other.label(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let span = |s: &Option<Span>| s.map(|s| json!({"line": s.line, "col": s.col}));
        match self {
            RunResult::Normal(v) => json!({"result": "normal", "value": v.as_ref().map(Val::to_json)}),
            RunResult::ContractViolation { id, kind, span } => json!({
                "result": "contract-violation",
                "assertion-id": id.to_string(),
                "kind": kind.as_str(),
                "line": span.line,
                "col": span.col,
            }),
            RunResult::RuntimeError { message, span: s } => {
                json!({"result": "runtime-error", "message": message, "at": span(s)})
            }
            RunResult::NotExecutable { message, span: s } => {
                json!({"result": "not-executable", "message": message, "at": span(s)})
            }
            RunResult::NotApplicable => json!({"result": "not-applicable"}),
        }
    }
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunResult::Normal(None) => f.write_str("normal termination"),
            RunResult::Normal(Some(v)) => write!(f, "normal termination, result = {v}"),
            RunResult::ContractViolation { id, kind, span } => write!(f, "contract violation {kind} ({id}) at {span}"),
            RunResult::RuntimeError { message, span: Some(s) } => write!(f, "runtime error at {s}: {message}"),
            RunResult::RuntimeError { message, span: None } => write!(f, "runtime error: {message}"),
            RunResult::NotExecutable { message, span: Some(s) } => write!(f, "not executable at {s}: {message}"),
            RunResult::NotExecutable { message, span: None } => write!(f, "not executable: {message}"),
            RunResult::NotApplicable => f.write_str("not applicable: an assumption does not hold for these inputs"),
        }
    }
}

/// Early exit from execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stop {
    Violation {
        id: AssertionId,
        kind: AssertKind,
        span: Span,
    },
    Runtime {
        message: String,
        span: Option<Span>,
    },
    NotExecutable {
        message: String,
        span: Option<Span>,
    },
    NotApplicable,
}

impl Stop {
    pub fn runtime(message: impl Into<String>) -> Stop {
        Stop::Runtime {
            message: message.into(),
            span: None,
        }
    }

    pub fn not_executable(message: impl Into<String>) -> Stop {
        Stop::NotExecutable {
            message: message.into(),
            span: None,
        }
    }

    /// Attach a position to errors that do not have one yet.
    pub fn at(self, s: Span) -> Stop {
        match self {
            Stop::Runtime { message, span: None } => Stop::Runtime { message, span: Some(s) },
            Stop::NotExecutable { message, span: None } => Stop::NotExecutable { message, span: Some(s) },
            other => other,
        }
    }

    /// How a failure inside a callee is seen by the caller of a pure
    /// method used in a specification.
    fn in_spec_call(self, f: &str) -> Stop {
        match self {
            Stop::Violation { .. } | Stop::NotApplicable | Stop::Runtime { .. } => {
                Stop::not_executable(format!("pure method `{f}` did not return normally"))
            }
            other => other,
        }
    }

    /// How a failure inside a callee is seen at a call statement. The
    /// caller already checked the callee's entry assumptions, so a false
    /// one indicates an inconsistency.
    fn in_call(self, f: &str) -> Stop {
        match self {
            Stop::NotApplicable => Stop::runtime(format!("assumption of `{f}` failed after its precondition held")),
            other => other,
        }
    }

    fn into_result(self) -> RunResult {
        match self {
            Stop::Violation { id, kind, span } => RunResult::ContractViolation { id, kind, span },
            Stop::Runtime { message, span } => RunResult::RuntimeError { message, span },
            Stop::NotExecutable { message, span } => RunResult::NotExecutable { message, span },
            Stop::NotApplicable => RunResult::NotApplicable,
        }
    }
}

/// Argument values in parameter order and global values by name. Globals
/// that are not listed take [`default_global`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Inputs {
    pub args: Vec<Val>,
    pub globals: BTreeMap<String, Val>,
}

impl Inputs {
    pub fn new(args: Vec<Val>) -> Self {
        Inputs {
            args,
            globals: BTreeMap::new(),
        }
    }

    /// `name = value` pairs for display.
    pub fn describe(&self, program: &TypedProgram, method: &str) -> String {
        let mut parts = Vec::new();
        if let Some(m) = program.method(method) {
            for (p, v) in m.params.iter().zip(&self.args) {
                parts.push(format!("{} = {v}", p.name));
            }
        }
        for (g, v) in &self.globals {
            parts.push(format!("{g} = {v}"));
        }
        parts.join(", ")
    }
}

/// Value of a global that the caller did not set: zero, false, the empty
/// array, or null for nullable arrays.
pub fn default_global(g: &TGlobal) -> Val {
    match (g.ty, g.nullable) {
        (Type::Int, _) => Val::int(0),
        (Type::Bool, _) => Val::Bool(false),
        (Type::IntArray, true) => Val::Array(None),
        (Type::IntArray, false) => Val::Array(Some(Vec::new())),
    }
}

pub(crate) fn default_of(sort: Sort) -> Val {
    match sort {
        Sort::Int => Val::Int(BigInt::from(0)),
        Sort::Bool => Val::Bool(false),
        Sort::Array => Val::Array(None),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("method `{0}` cannot be executed: {1}")]
    Weave(String, String),
    #[error("the counterexample does not determine {0}")]
    Incomplete(String),
}

/// Executable program: typed methods with their woven bodies.
pub struct Rac<'p> {
    pub program: &'p TypedProgram,
    pub mode: ArithmeticMode,
    bodies: HashMap<String, Result<GuardedBody, WeaveError>>,
    pub fuel: u64,
    steps: Cell<u64>,
}

impl<'p> Rac<'p> {
    pub fn new(program: &'p TypedProgram, mode: ArithmeticMode) -> Self {
        let bodies = program
            .methods
            .iter()
            .filter(|m| m.body.is_some())
            .map(|m| (m.name.clone(), weave_method(program, m, mode)))
            .collect();
        Rac {
            program,
            mode,
            bodies,
            fuel: DEFAULT_FUEL,
            steps: Cell::new(0),
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn body(&self, method: &str) -> Result<&GuardedBody, Stop> {
        match self.bodies.get(method) {
            Some(Ok(b)) => Ok(b),
            Some(Err(e)) => Err(Stop::NotExecutable {
                message: e.message.clone(),
                span: Some(e.span),
            }),
            None => Err(Stop::not_executable(format!("method `{method}` has no body"))),
        }
    }

    pub(crate) fn tick(&self) -> Result<(), Stop> {
        let n = self.steps.get() + 1;
        self.steps.set(n);
        if n > self.fuel {
            return Err(Stop::not_executable(format!("execution exceeded {} steps", self.fuel)));
        }
        Ok(())
    }

    fn global_values(&self, inputs: &Inputs) -> BTreeMap<String, Val> {
        self.program
            .globals
            .iter()
            .map(|g| {
                (
                    g.name.clone(),
                    inputs
                        .globals
                        .get(&g.name)
                        .cloned()
                        .unwrap_or_else(|| default_global(g)),
                )
            })
            .collect()
    }

    fn check_arity(&self, method: &str, inputs: &Inputs) -> Result<(), Stop> {
        let m = self
            .program
            .method(method)
            .ok_or_else(|| Stop::not_executable(format!("unknown method `{method}`")))?;
        if m.params.len() != inputs.args.len() {
            return Err(Stop::runtime(format!(
                "`{method}` takes {} arguments, {} given",
                m.params.len(),
                inputs.args.len()
            )));
        }
        Ok(())
    }

    /// Execute the woven body of `method`.
    pub fn run(&self, method: &str, inputs: &Inputs) -> RunResult {
        self.steps.set(0);
        let r = self.check_arity(method, inputs).and_then(|_| {
            let globals = self.global_values(inputs);
            woven::run(self, method, inputs.args.clone(), &globals, woven::Policy::Concrete, 0)
        });
        match r {
            Ok(out) => RunResult::Normal(out.result),
            Err(stop) => stop.into_result(),
        }
    }

    /// Execute `method` by walking the typed AST.
    pub fn run_direct(&self, method: &str, inputs: &Inputs) -> RunResult {
        self.steps.set(0);
        let r = self.check_arity(method, inputs).and_then(|_| {
            let globals = self.global_values(inputs);
            direct::run(self, method, inputs.args.clone(), &globals, 0)
        });
        match r {
            Ok(out) => RunResult::Normal(out.result),
            Err(stop) => stop.into_result(),
        }
    }

    /// Re-execute the path of a counterexample, taking the values of
    /// havocked variables from the model instead of running loops and
    /// callees.
    pub fn replay(&self, trace: &CounterexampleTrace) -> Result<RunResult, ReplayError> {
        let method = &trace.failing.method;
        let body = self
            .body(method)
            .map_err(|e| ReplayError::Weave(method.clone(), format!("{e:?}")))?;
        let mut env = HashMap::new();
        for e in &trace.entry {
            let v = e
                .value
                .clone()
                .ok_or_else(|| ReplayError::Incomplete(format!("the entry value of `{}`", e.source)))?;
            env.insert(e.var.clone(), v);
        }
        for v in &body.vars {
            env.entry(v.name.clone()).or_insert_with(|| default_of(v.sort));
        }
        self.steps.set(0);
        match woven::run_env(self, body, env, woven::Policy::Replay(&trace.havocs), 0) {
            Ok(out) => Ok(RunResult::Normal(out.result)),
            Err(Stop::NotExecutable { message, .. }) if message.starts_with(woven::REPLAY_MISSING) => Err(
                ReplayError::Incomplete(message[woven::REPLAY_MISSING.len()..].to_string()),
            ),
            Err(stop) => Ok(stop.into_result()),
        }
    }

    /// Value of a pure method applied to `args` (parameters, then globals
    /// in declaration order).
    pub(crate) fn pure_value(&self, f: &str, args: Vec<Val>, depth: usize, direct: bool) -> Result<Val, Stop> {
        let m = self
            .program
            .method(f)
            .ok_or_else(|| Stop::not_executable(format!("unknown method `{f}`")))?;
        let n = m.params.len();
        let globals: BTreeMap<String, Val> = self
            .program
            .globals
            .iter()
            .map(|g| g.name.clone())
            .zip(args[n..].iter().cloned())
            .collect();
        let args = args[..n].to_vec();
        let out = if direct {
            direct::run(self, f, args, &globals, depth)
        } else {
            woven::run(self, f, args, &globals, woven::Policy::Concrete, depth)
        };
        match out {
            Ok(out) => out
                .result
                .ok_or_else(|| Stop::not_executable(format!("pure method `{f}` returned no value"))),
            Err(e) => Err(e.in_spec_call(f)),
        }
    }
}

/// Final state of a method run.
#[derive(Debug, Clone)]
pub(crate) struct Finished {
    pub result: Option<Val>,
    /// Parameter values at exit, in parameter order.
    pub params: Vec<Val>,
    /// Global values at exit, by source name.
    pub globals: BTreeMap<String, Val>,
}

//! Per-method verification: validity, counterexamples, enumeration of all
//! falsifiable assertions, and feasibility of paths.

pub mod report;
pub mod trace;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::Serialize;

pub use trace::{extract_counterexample, fetch_model, CounterexampleTrace, EntryValue, PathCondition, TraceStep};

use crate::arith::ArithmeticMode;
use crate::diag::Diagnostic;
use crate::ir::{Sort, Term};
use crate::smt::{emit_problem, Problem, Script, Session, SolverConfig, VerdictKind};
use crate::source::Span;
use crate::typecheck::{TMethod, TypedProgram};
use crate::vcgen::vc::{enable_sym, graph_symbols, label_sym};
use crate::vcgen::{
    build_cfg, compact_vc, fn_signatures, passify, reach_encoding, Cfg, CompactVc, FnSig, PassiveGraph,
};
use crate::weave::{weave_method, AssertKind, AssertionId, GuardedBody, WeaveError};

pub const WEAVE_ERROR: &str = "WEAVE001";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockMode {
    #[default]
    PerAssertion,
    PerPath,
}

impl std::str::FromStr for BlockMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "per-assertion" => Ok(BlockMode::PerAssertion),
            "per-path" => Ok(BlockMode::PerPath),
            _ => Err(format!("unknown block mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub mode: ArithmeticMode,
    pub solver: SolverConfig,
    pub enumerate: bool,
    pub block_mode: BlockMode,
    pub feasibility: bool,
    pub max_violations: Option<usize>,
    pub workers: Option<usize>,
    pub dump_smt: Option<PathBuf>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: ArithmeticMode::Safe,
            solver: SolverConfig::default(),
            enumerate: true,
            block_mode: BlockMode::PerAssertion,
            feasibility: true,
            max_violations: None,
            workers: None,
            dump_smt: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Valid,
    Violations,
    Unknown,
    Timeout,
    SolverError,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Valid => "valid",
            Status::Violations => "violations",
            Status::Unknown => "unknown",
            Status::Timeout => "timeout",
            Status::SolverError => "solver-error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityKind {
    InfeasibleExit,
    InfeasibleAssertion,
}

impl FeasibilityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeasibilityKind::InfeasibleExit => "infeasible-exit",
            FeasibilityKind::InfeasibleAssertion => "infeasible-assertion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityWarning {
    pub kind: FeasibilityKind,
    pub span: Span,
    pub assertion: Option<AssertionId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub id: AssertionId,
    pub kind: AssertKind,
    pub span: Span,
    pub trace: CounterexampleTrace,
}

#[derive(Debug, Clone)]
pub struct VerificationOutcome {
    pub method: String,
    pub status: Status,
    pub violations: Vec<Violation>,
    pub feasibility: Vec<FeasibilityWarning>,
    /// Feasibility targets the solver could not decide.
    pub unchecked: Vec<Span>,
    /// Enumeration stopped early.
    pub partial: bool,
    pub time: Duration,
    pub solver: String,
    pub message: Option<String>,
}

impl VerificationOutcome {
    fn new(method: &str, solver: &str) -> Self {
        VerificationOutcome {
            method: method.to_string(),
            status: Status::Valid,
            violations: Vec::new(),
            feasibility: Vec::new(),
            unchecked: Vec::new(),
            partial: false,
            time: Duration::ZERO,
            solver: solver.to_string(),
            message: None,
        }
    }

    fn fail(mut self, status: Status, message: impl Into<String>) -> Self {
        self.status = status;
        self.message = Some(message.into());
        self
    }
}

/// Everything derived from one method before the solver is involved.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub body: GuardedBody,
    pub name_span: Span,
    pub cfg: Cfg,
    pub graph: PassiveGraph,
    pub vc: CompactVc,
    pub fns: Vec<FnSig>,
}

pub fn prepare(program: &TypedProgram, method: &TMethod, mode: ArithmeticMode) -> Result<Prepared, WeaveError> {
    let body = weave_method(program, method, mode)?;
    let cfg = build_cfg(&body);
    let graph = passify(&body, &cfg);
    let vc = compact_vc(&graph);
    Ok(Prepared {
        body,
        name_span: method.name_span,
        cfg,
        graph,
        vc,
        fns: fn_signatures(program),
    })
}

impl Prepared {
    pub fn main_problem(&self) -> Problem {
        let mut symbols = graph_symbols(&self.graph);
        symbols.extend(self.vc.bool_symbols().into_iter().map(|s| (s, Sort::Bool)));
        Problem {
            symbols,
            definitions: self.vc.defs.clone(),
            assertions: vec![Term::not(self.vc.goal.clone())],
        }
    }

    pub fn main_script(&self, logic: Option<&str>) -> Result<Script, crate::smt::EmitError> {
        emit_problem(&self.main_problem(), &self.fns, logic)
    }
}

fn dump(opts: &VerifyOptions, method: &str, purpose: &str, text: &str) {
    if let Some(dir) = &opts.dump_smt {
        let _ = std::fs::create_dir_all(dir);
        let _ = std::fs::write(dir.join(format!("{method}.{purpose}.smt2")), text);
    }
}

fn open_session(opts: &VerifyOptions, script: &Script) -> Result<Session, String> {
    let mut s = Session::start(&opts.solver).map_err(|e| e.to_string())?;
    s.send(&script.prelude).map_err(|e| e.to_string())?;
    Ok(s)
}

pub fn verify_prepared(p: &Prepared, opts: &VerifyOptions) -> VerificationOutcome {
    let start = Instant::now();
    let mut out = run_checks(p, opts);
    out.time = start.elapsed();
    out
}

fn run_checks(p: &Prepared, opts: &VerifyOptions) -> VerificationOutcome {
    let method = p.body.method.as_str();
    let out = VerificationOutcome::new(method, &opts.solver.name);
    let script = match p.main_script(opts.solver.logic.as_deref()) {
        Ok(s) => s,
        Err(e) => return out.fail(Status::SolverError, e.to_string()),
    };
    dump(opts, method, "main", &script.text());
    let mut session = match open_session(opts, &script) {
        Ok(s) => s,
        Err(e) => return out.fail(Status::SolverError, e),
    };
    for g in &script.goals {
        if let Err(e) = session.send(&format!("(assert {g})")) {
            return out.fail(Status::SolverError, e.to_string());
        }
    }
    let verdict = session.check_sat();
    match verdict.kind {
        VerdictKind::Unsat => {
            drop(session);
            let mut out = out;
            if opts.feasibility {
                feasibility_check(p, opts, &mut out);
            }
            out
        }
        VerdictKind::Sat => enumerate_violations(p, opts, &script, session, out),
        VerdictKind::Unknown => out.fail(Status::Unknown, verdict.raw),
        VerdictKind::Timeout => out.fail(Status::Timeout, "solver timed out"),
        VerdictKind::Crashed => out.fail(Status::SolverError, verdict.raw),
    }
}

fn enumerate_violations(
    p: &Prepared,
    opts: &VerifyOptions,
    script: &Script,
    mut session: Session,
    mut out: VerificationOutcome,
) -> VerificationOutcome {
    let method = p.body.method.clone();
    let mut blocking: Vec<String> = Vec::new();
    loop {
        let model = match fetch_model(&mut session, &p.graph, script) {
            Ok(m) => m,
            Err(e) => {
                out.partial = true;
                out.message = Some(e.to_string());
                break;
            }
        };
        let trace = match extract_counterexample(&model, &p.body, &p.graph) {
            Ok(t) => t,
            Err(e) => return out.fail(Status::SolverError, e.to_string()),
        };
        let k = trace.failing.ordinal;
        let block = match opts.block_mode {
            BlockMode::PerAssertion => Term::not(Term::var(enable_sym(k))),
            BlockMode::PerPath => Term::or(Term::not(trace.path.term()), Term::var(label_sym(k))),
        };
        out.violations.push(Violation {
            id: trace.failing.clone(),
            kind: trace.kind,
            span: trace.span,
            trace,
        });
        if !opts.enumerate {
            break;
        }
        if opts.max_violations.is_some_and(|m| out.violations.len() >= m) {
            out.partial = true;
            break;
        }
        let text = match script.term(&block) {
            Ok(t) => t,
            Err(e) => return out.fail(Status::SolverError, e.to_string()),
        };
        blocking.push(text.clone());
        let mut standalone = script.prelude.clone();
        for g in script.goals.iter().chain(&blocking) {
            standalone.push_str(&format!("(assert {g})\n"));
        }
        standalone.push_str("(check-sat)\n");
        dump(opts, &method, &format!("enum-{}", blocking.len()), &standalone);
        let v = session.assert_and_recheck(&text);
        match v.kind {
            VerdictKind::Sat => continue,
            VerdictKind::Unsat => break,
            _ => {
                out.partial = true;
                out.message = Some(format!("enumeration stopped: {:?} {}", v.kind, v.raw));
                break;
            }
        }
    }
    out.violations.sort_by_key(|v| (v.id.ordinal, v.trace.blocks.clone()));
    out.status = Status::Violations;
    out
}

/// Reachability of the exit and of every assertion, with assertions read
/// as no-ops. Unreachable targets become warnings.
pub fn feasibility_check(p: &Prepared, opts: &VerifyOptions, out: &mut VerificationOutcome) {
    let method = p.body.method.as_str();
    let reach = reach_encoding(&p.graph);
    let mut symbols = graph_symbols(&p.graph);
    symbols.extend(reach.bool_symbols().into_iter().map(|s| (s, Sort::Bool)));
    let mut targets = vec![(None, reach.exit.clone())];
    targets.extend(reach.assertions.iter().map(|(k, t)| (Some(*k), t.clone())));
    let problem = Problem {
        symbols,
        definitions: reach.defs.clone(),
        assertions: targets.iter().map(|(_, t)| t.clone()).collect(),
    };
    let script = match emit_problem(&problem, &p.fns, opts.solver.logic.as_deref()) {
        Ok(s) => s,
        Err(_) => {
            out.unchecked.push(p.name_span);
            return;
        }
    };
    let mut session: Option<Session> = None;
    for (n, ((target, _), goal)) in targets.iter().zip(&script.goals).enumerate() {
        dump(
            opts,
            method,
            &format!("feas-{n}"),
            &format!("{}(assert {goal})\n(check-sat)\n", script.prelude),
        );
        let span = match target {
            None => p.name_span,
            Some(k) => p.body.assertions[*k].span,
        };
        if session.as_ref().is_none_or(|s| !s.is_alive()) {
            session = open_session(opts, &script).ok();
        }
        let Some(s) = session.as_mut() else {
            out.unchecked.push(span);
            continue;
        };
        let verdict = s.push().map(|_| s.assert_and_recheck(goal));
        let _ = s.pop();
        match verdict.map(|v| v.kind) {
            Ok(VerdictKind::Sat) => {}
            Ok(VerdictKind::Unsat) => out.feasibility.push(FeasibilityWarning {
                kind: if target.is_none() {
                    FeasibilityKind::InfeasibleExit
                } else {
                    FeasibilityKind::InfeasibleAssertion
                },
                span,
                assertion: target.map(|k| p.body.assertion_id(k)),
            }),
            _ => out.unchecked.push(span),
        }
    }
    for &k in &p.graph.dropped {
        out.feasibility.push(FeasibilityWarning {
            kind: FeasibilityKind::InfeasibleAssertion,
            span: p.body.assertions[k].span,
            assertion: Some(p.body.assertion_id(k)),
        });
    }
}

pub fn verify_method(
    program: &TypedProgram,
    method: &TMethod,
    opts: &VerifyOptions,
) -> Result<VerificationOutcome, WeaveError> {
    Ok(verify_prepared(&prepare(program, method, opts.mode)?, opts))
}

/// Methods with bodies, optionally filtered by name, in source order.
pub fn selected_methods<'a>(program: &'a TypedProgram, filter: &[String]) -> Vec<&'a TMethod> {
    program
        .methods
        .iter()
        .filter(|m| m.body.is_some())
        .filter(|m| filter.is_empty() || filter.contains(&m.name))
        .collect()
}

/// Verify methods in parallel; results come back in source order. Weave
/// errors are reported as diagnostics before any solver runs.
pub fn verify_program(
    program: &TypedProgram,
    filter: &[String],
    opts: &VerifyOptions,
) -> Result<Vec<VerificationOutcome>, Vec<Diagnostic>> {
    let mut prepared = Vec::new();
    let mut errors = Vec::new();
    for m in selected_methods(program, filter) {
        match prepare(program, m, opts.mode) {
            Ok(p) => prepared.push(p),
            Err(e) => errors.push(Diagnostic::error(WEAVE_ERROR, e.span, e.message)),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let run = || {
        use rayon::prelude::*;
        prepared
            .par_iter()
            .map(|p| verify_prepared(p, opts))
            .collect::<Vec<_>>()
    };
    let outcomes = match opts.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    };
    Ok(outcomes)
}

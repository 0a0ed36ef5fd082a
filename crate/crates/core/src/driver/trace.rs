//! Counterexample reconstruction from solver models.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;

use crate::ir::{Sort, Term};
use crate::smt::{ModelValues, Script, Session, SessionError, Value};
use crate::source::Span;
use crate::value::Val;
use crate::vcgen::vc::{block_sym, enable_sym, label_sym};
use crate::vcgen::{Component, PCmd, PKind, PassiveGraph};
use crate::weave::{AssertKind, AssertionId, GuardedBody, HavocSite, OriginKind, VarRole};

/// Longest array whose contents are read back from a model.
pub const MAX_ARRAY_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryValue {
    /// Unique variable name in the guarded body.
    pub var: String,
    pub source: String,
    pub role: VarRole,
    /// `None` when the model did not determine the value.
    pub value: Option<Val>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub span: Span,
    pub kind: OriginKind,
    /// Source-level names with values newly determined at this step.
    pub state: Vec<(String, Option<Val>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathCondition {
    /// Branch guards taken, over incarnation symbols.
    pub literals: Vec<Term>,
    pub spans: Vec<Span>,
}

impl PathCondition {
    pub fn term(&self) -> Term {
        Term::and_all(self.literals.iter().cloned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleTrace {
    pub failing: AssertionId,
    pub kind: AssertKind,
    pub span: Span,
    pub detail: String,
    pub entry: Vec<EntryValue>,
    pub steps: Vec<TraceStep>,
    pub blocks: Vec<usize>,
    /// Values chosen by the model for the variables havocked at each site.
    pub havocs: BTreeMap<HavocSite, Vec<(String, Option<Val>)>>,
    pub path: PathCondition,
}

impl CounterexampleTrace {
    pub fn entry_complete(&self) -> bool {
        self.entry.iter().all(|e| e.value.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("counterexample does not select a path to a failing assertion: {0}")]
pub struct TraceError(pub String);

type Cells = BTreeMap<(String, Component), String>;

/// Query every symbol the trace walk needs, arrays element-wise.
pub fn fetch_model(session: &mut Session, graph: &PassiveGraph, script: &Script) -> Result<ModelValues, SessionError> {
    let mut model = ModelValues::default();
    let scalars: Vec<(&String, &String)> = script
        .names
        .to_smt
        .iter()
        .filter(|(l, _)| script.names.sorts.get(*l) != Some(&Sort::Array))
        .collect();
    let terms: Vec<String> = scalars.iter().map(|(_, s)| (*s).clone()).collect();
    for ((logical, _), v) in scalars.iter().zip(lenient_values(session, &terms)?) {
        model.values.insert((*logical).clone(), v);
    }
    let mut max_len: BTreeMap<&str, usize> = BTreeMap::new();
    for inc in &graph.table.incarnations {
        if inc.component == Component::Len {
            let n = model
                .int(&inc.symbol)
                .and_then(|v| v.to_usize())
                .unwrap_or(0)
                .min(MAX_ARRAY_LEN);
            let e = max_len.entry(inc.var.as_str()).or_insert(0);
            *e = (*e).max(n);
        }
    }
    let mut keys = Vec::new();
    let mut terms = Vec::new();
    for inc in &graph.table.incarnations {
        if inc.component != Component::Value || inc.sort != Sort::Array {
            continue;
        }
        let Ok(smt) = script.names.smt(&inc.symbol) else {
            continue;
        };
        for i in 0..max_len.get(inc.var.as_str()).copied().unwrap_or(0) {
            keys.push(format!("{}[{i}]", inc.symbol));
            terms.push(format!("(select {smt} {i})"));
        }
    }
    for (k, v) in keys.into_iter().zip(lenient_values(session, &terms)?) {
        model.values.insert(k, v);
    }
    Ok(model)
}

/// Values for `terms`, falling back to one query per term when a batch is
/// rejected; terms the solver cannot evaluate become `Unavailable`.
fn lenient_values(session: &mut Session, terms: &[String]) -> Result<Vec<Value>, SessionError> {
    match session.get_values(terms) {
        Ok(v) => Ok(v.iter().map(Value::from_sexp).collect()),
        Err(SessionError::Solver(_) | SessionError::Protocol(_)) => {
            let mut out = Vec::new();
            for t in terms {
                match session.get_values(std::slice::from_ref(t)) {
                    Ok(v) => out.push(Value::from_sexp(&v[0])),
                    Err(SessionError::Solver(_) | SessionError::Protocol(_)) => out.push(Value::Unavailable),
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        }
        Err(e) => Err(e),
    }
}

fn val_of(model: &ModelValues, sort: Sort, var: &str, cur: &Cells) -> Option<Val> {
    let cell = |c: Component| cur.get(&(var.to_string(), c));
    match sort {
        Sort::Int => model.int(cell(Component::Value)?).cloned().map(Val::Int),
        Sort::Bool => model.bool(cell(Component::Value)?).map(Val::Bool),
        Sort::Array => {
            if model.bool(cell(Component::Null)?)? {
                return Some(Val::Array(None));
            }
            let len = model.int(cell(Component::Len)?)?.to_usize()?;
            if len > MAX_ARRAY_LEN {
                return None;
            }
            let a = cell(Component::Value)?;
            let items = (0..len)
                .map(|i| model.int(&format!("{a}[{i}]")).cloned())
                .collect::<Option<Vec<_>>>()?;
            Some(Val::Array(Some(items)))
        }
    }
}

fn display_name(body: &GuardedBody, var: &str) -> Option<String> {
    let info = body.var(var)?;
    match info.role {
        VarRole::Temp => None,
        VarRole::Result => Some("\\result".into()),
        _ => Some(info.source.clone()),
    }
}

pub fn extract_counterexample(
    model: &ModelValues,
    body: &GuardedBody,
    graph: &PassiveGraph,
) -> Result<CounterexampleTrace, TraceError> {
    let table = &graph.table;
    let entry = body
        .vars
        .iter()
        .filter(|v| matches!(v.role, VarRole::Param | VarRole::Global))
        .map(|v| EntryValue {
            var: v.name.clone(),
            source: v.source.clone(),
            role: v.role,
            value: val_of(model, v.sort, &v.name, &table.entry),
        })
        .collect();
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut havocs = BTreeMap::new();
    let mut path = PathCondition::default();
    let mut blocks = Vec::new();
    let mut b = graph.entry;
    loop {
        blocks.push(b);
        let mut cur = table.block_in[b].clone();
        for c in &graph.blocks[b].cmds {
            match c {
                PCmd::Assume {
                    term,
                    kind,
                    origin,
                    defs,
                } => {
                    if *kind == PKind::Branch {
                        path.literals.push(term.clone());
                        path.spans.extend(origin.map(|o| o.span));
                    }
                    let mut changed = Vec::new();
                    for d in defs {
                        let inc = table
                            .lookup(d)
                            .ok_or_else(|| TraceError(format!("unknown symbol {d}")))?;
                        cur.insert((inc.var.clone(), inc.component), d.clone());
                        if !changed.contains(&inc.var) {
                            changed.push(inc.var.clone());
                        }
                    }
                    let vals: Vec<(String, Option<Val>)> = changed
                        .iter()
                        .map(|v| (v.clone(), val_of(model, body.var(v).expect("var").sort, v, &cur)))
                        .collect();
                    if let PKind::Havoc(site) = kind {
                        havocs.insert(*site, vals.clone());
                    }
                    if let Some(o) = origin {
                        let state = vals
                            .into_iter()
                            .filter_map(|(v, x)| Some((display_name(body, &v)?, x)))
                            .collect();
                        push_step(&mut steps, o.span, o.kind, state);
                    }
                }
                PCmd::Assert { term, id, origin } => {
                    let en = model.bool(&enable_sym(*id)).unwrap_or(true);
                    let holds = model.bool(&label_sym(*id));
                    if en && holds == Some(false) {
                        let mut mentioned = BTreeSet::new();
                        for s in term.free_vars() {
                            if let Some(inc) = table.lookup(&s) {
                                mentioned.insert(inc.var.clone());
                            }
                        }
                        let state = mentioned
                            .iter()
                            .filter_map(|v| {
                                let sort = body.var(v)?.sort;
                                Some((display_name(body, v)?, val_of(model, sort, v, &cur)))
                            })
                            .collect();
                        push_step(&mut steps, origin.span, origin.kind, state);
                        let info = &body.assertions[*id];
                        return Ok(CounterexampleTrace {
                            failing: body.assertion_id(*id),
                            kind: info.kind,
                            span: info.span,
                            detail: info.detail.clone(),
                            entry,
                            steps,
                            blocks,
                            havocs,
                            path,
                        });
                    }
                    push_step(&mut steps, origin.span, origin.kind, Vec::new());
                }
            }
        }
        b = *graph.blocks[b]
            .succs
            .iter()
            .find(|&&s| model.bool(&block_sym(s)) == Some(false))
            .ok_or_else(|| TraceError(format!("no falsified successor after block {b}")))?;
    }
}

fn push_step(steps: &mut Vec<TraceStep>, span: Span, kind: OriginKind, state: Vec<(String, Option<Val>)>) {
    if let Some(last) = steps.last_mut() {
        if last.span.line == span.line {
            for (n, v) in state {
                match last.state.iter_mut().find(|(m, _)| *m == n) {
                    Some(slot) => slot.1 = v,
                    None => last.state.push((n, v)),
                }
            }
            return;
        }
    }
    steps.push(TraceStep { span, kind, state });
}

//! JSON result documents.

use serde_json::{json, Map, Value as Json};

use super::{CounterexampleTrace, VerificationOutcome};
use crate::source::SourceUnit;
use crate::value::Val;

fn state_json(state: &[(String, Option<Val>)]) -> Json {
    let mut m = Map::new();
    for (n, v) in state {
        m.insert(
            n.clone(),
            v.as_ref().map(Val::to_json).unwrap_or(Json::String("?".into())),
        );
    }
    Json::Object(m)
}

pub fn trace_json(t: &CounterexampleTrace, unit: &SourceUnit) -> Json {
    let steps: Vec<Json> = t
        .steps
        .iter()
        .map(|s| {
            json!({
                "line": s.span.line,
                "text": unit.line_text(s.span.line).trim(),
                "state": state_json(&s.state),
            })
        })
        .collect();
    let entry: Vec<(String, Option<Val>)> = t.entry.iter().map(|e| (e.source.clone(), e.value.clone())).collect();
    json!({
        "assertion-id": t.failing.to_string(),
        "kind": t.kind.as_str(),
        "line": t.span.line,
        "col": t.span.col,
        "path-blocks": t.blocks,
        "trace-steps": steps,
        "entry-state": state_json(&entry),
    })
}

pub fn outcome_json(o: &VerificationOutcome, unit: &SourceUnit) -> Json {
    let mut obj = json!({
        "name": o.method,
        "status": o.status.as_str(),
        "time-ms": o.time.as_millis() as u64,
        "solver": o.solver,
        "violations": o.violations.iter().map(|v| trace_json(&v.trace, unit)).collect::<Vec<_>>(),
        "feasibility": o.feasibility.iter().map(|w| json!({
            "line": w.span.line,
            "kind": w.kind.as_str(),
        })).collect::<Vec<_>>(),
    });
    if o.partial {
        obj["partial"] = Json::Bool(true);
    }
    if !o.unchecked.is_empty() {
        obj["unchecked"] = o.unchecked.iter().map(|s| json!({ "line": s.line })).collect();
    }
    if let Some(m) = &o.message {
        obj["message"] = Json::String(m.clone());
    }
    obj
}

pub fn document(file: &str, outcomes: &[VerificationOutcome], unit: &SourceUnit) -> Json {
    json!({
        "file": file,
        "methods": outcomes.iter().map(|o| outcome_json(o, unit)).collect::<Vec<_>>(),
    })
}

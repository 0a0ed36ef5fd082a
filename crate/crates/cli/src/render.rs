//! Human-readable reports.

use std::fmt::Write as _;
use std::time::Duration;

use mjv_core::driver::VerificationOutcome;
use mjv_core::{CounterexampleTrace, SourceUnit, Val};

fn annotations(state: &[(String, Option<Val>)]) -> String {
    state
        .iter()
        .map(|(n, v)| match v {
            Some(v) => format!("⊢ {n} = {v}"),
            None => format!("⊢ {n} = ?"),
        })
        .collect::<Vec<_>>()
        .join("  ")
}

/// Entry state first, then one line per executed source line with the
/// values that became known there. The failing line is marked with `>`.
pub fn render_trace(trace: &CounterexampleTrace, unit: &SourceUnit) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} at line {}, column {}: {}",
        trace.failing,
        trace.kind.as_str(),
        trace.span.line,
        trace.span.col,
        trace.kind.describe()
    );
    let entry: Vec<(String, Option<Val>)> = trace
        .entry
        .iter()
        .map(|e| (e.source.clone(), e.value.clone()))
        .collect();
    let _ = writeln!(out, "    entry | {}", annotations(&entry).trim_end());
    let width = trace
        .steps
        .iter()
        .map(|s| unit.line_text(s.span.line).trim().chars().count())
        .max()
        .unwrap_or(0);
    let last = trace.steps.len().saturating_sub(1);
    for (i, step) in trace.steps.iter().enumerate() {
        let failing = i == last && step.span.line == trace.span.line;
        let mark = if failing { '>' } else { ' ' };
        let text = unit.line_text(step.span.line).trim();
        let line = format!(
            "  {mark} {:>4} | {text:<width$}  {}",
            step.span.line,
            annotations(&step.state)
        );
        let _ = writeln!(out, "{}", line.trim_end());
    }
    if trace.steps.last().is_none_or(|s| s.span.line != trace.span.line) {
        let _ = writeln!(
            out,
            "  > {:>4} | {}",
            trace.span.line,
            unit.line_text(trace.span.line).trim()
        );
    }
    out
}

fn millis(d: Duration) -> String {
    format!("{} ms", d.as_millis())
}

/// Per-method status table.
pub fn render_table(outcomes: &[VerificationOutcome]) -> String {
    let rows: Vec<[String; 4]> = outcomes
        .iter()
        .map(|o| {
            let mut status = o.status.as_str().to_string();
            if o.partial {
                status.push_str(" (partial)");
            }
            [o.method.clone(), status, o.solver.clone(), millis(o.time)]
        })
        .collect();
    let header = ["method", "status", "solver", "time"];
    let mut widths = header.map(str::len);
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: [&str; 4]| {
        let s = format!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        );
        let _ = writeln!(out, "{}", s.trim_end());
    };
    line(header);
    for r in &rows {
        line([&r[0], &r[1], &r[2], &r[3]]);
    }
    out
}

/// Table, then every violation trace, feasibility warning and solver message.
pub fn render_outcomes(outcomes: &[VerificationOutcome], unit: &SourceUnit) -> String {
    let mut out = render_table(outcomes);
    for o in outcomes {
        if let Some(m) = &o.message {
            let _ = writeln!(out, "\n{}: {}: {m}", o.method, o.status.as_str());
        }
        for v in &o.violations {
            out.push('\n');
            out.push_str(&render_trace(&v.trace, unit));
        }
        for w in &o.feasibility {
            let _ = writeln!(
                out,
                "\nwarning: {}: {} at line {}: {}",
                o.method,
                w.kind.as_str(),
                w.span.line,
                unit.line_text(w.span.line).trim()
            );
        }
        for s in &o.unchecked {
            let _ = writeln!(
                out,
                "\nnote: {}: feasibility of line {} could not be decided",
                o.method, s.line
            );
        }
    }
    out
}

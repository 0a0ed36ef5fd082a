//! Stable textual dump of a guarded body.

use std::fmt::Write;

use super::body::*;

pub fn print_body(b: &GuardedBody) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "method {} mode {}", b.method, b.mode);
    for v in &b.vars {
        let role = match v.role {
            VarRole::Param => "param",
            VarRole::Global => "global",
            VarRole::Local => "local",
            VarRole::Result => "result",
            VarRole::Temp => "temp",
        };
        let null = if v.nullable { " nullable" } else { "" };
        let _ = writeln!(out, "  var {}: {} {role}{null}", v.name, v.sort);
    }
    out.push_str("body:\n");
    cmds(&mut out, b, &b.cmds, 1);
    out.push_str("exit:\n");
    cmds(&mut out, b, &b.exit, 1);
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn cmds(out: &mut String, b: &GuardedBody, list: &[Cmd], level: usize) {
    for c in list {
        indent(out, level);
        match c {
            Cmd::Assume { term, role, .. } => {
                let _ = writeln!(out, "assume[{role:?}] {term}");
            }
            Cmd::Assert { term, id, .. } => {
                let info = &b.assertions[*id];
                let _ = writeln!(out, "assert #{id} {} @{} {term}", info.kind, info.span);
            }
            Cmd::Assign {
                lhs: Lhs::Var(v),
                value,
                ..
            } => {
                let _ = writeln!(out, "{v} := {value}");
            }
            Cmd::Assign {
                lhs: Lhs::Elem(v, i),
                value,
                ..
            } => {
                let _ = writeln!(out, "{v}[{i}] := {value}");
            }
            Cmd::Havoc { targets, site, .. } => {
                let names: Vec<_> = targets
                    .iter()
                    .map(|t| {
                        if t.elements_only {
                            format!("{}[*]", t.name)
                        } else {
                            t.name.clone()
                        }
                    })
                    .collect();
                let _ = writeln!(out, "havoc[{site}] {}", names.join(", "));
            }
            Cmd::If {
                cond,
                then_cmds,
                else_cmds,
                ..
            } => {
                let _ = writeln!(out, "if {cond}");
                cmds(out, b, then_cmds, level + 1);
                indent(out, level);
                out.push_str("else\n");
                cmds(out, b, else_cmds, level + 1);
                indent(out, level);
                out.push_str("end\n");
            }
            Cmd::Snapshot { tag } => {
                let _ = writeln!(out, "snapshot {tag}");
            }
            Cmd::Return { .. } => out.push_str("return\n"),
        }
    }
}

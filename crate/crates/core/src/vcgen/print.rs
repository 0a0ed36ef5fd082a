//! Text dumps of the CFG and passive graph.

use std::fmt::Write;

use super::cfg::{BCmd, Cfg};
use super::passify::{PCmd, PKind, PassiveGraph};
use crate::weave::Lhs;

pub fn print_cfg(cfg: &Cfg) -> String {
    let mut out = String::new();
    for b in &cfg.blocks {
        let _ = writeln!(out, "block {} -> {:?}", b.id, b.succs);
        for c in &b.cmds {
            let _ = match c {
                BCmd::Assume { term, role: None, .. } => writeln!(out, "  guard {term}"),
                BCmd::Assume {
                    term, role: Some(r), ..
                } => writeln!(out, "  assume[{r:?}] {term}"),
                BCmd::Assert { term, id, .. } => writeln!(out, "  assert #{id} {term}"),
                BCmd::Assign {
                    lhs: Lhs::Var(v),
                    value,
                    ..
                } => writeln!(out, "  {v} := {value}"),
                BCmd::Assign {
                    lhs: Lhs::Elem(v, i),
                    value,
                    ..
                } => writeln!(out, "  {v}[{i}] := {value}"),
                BCmd::Havoc { targets, site, .. } => {
                    let names: Vec<&str> = targets.iter().map(|t| t.name.as_str()).collect();
                    writeln!(out, "  havoc@{site} {}", names.join(", "))
                }
                BCmd::Snapshot { tag } => writeln!(out, "  snapshot {tag}"),
            };
        }
    }
    if !cfg.dropped.is_empty() {
        let _ = writeln!(out, "dropped {:?}", cfg.dropped);
    }
    out
}

pub fn print_passive(g: &PassiveGraph) -> String {
    let mut out = String::new();
    for b in &g.blocks {
        let _ = writeln!(out, "block {} -> {:?}", b.id, b.succs);
        for c in &b.cmds {
            let _ = match c {
                PCmd::Assume {
                    term,
                    kind: PKind::Branch,
                    ..
                } => writeln!(out, "  guard {term}"),
                PCmd::Assume { term, kind, .. } => writeln!(out, "  assume[{kind:?}] {term}"),
                PCmd::Assert { term, id, .. } => writeln!(out, "  assert #{id} {term}"),
            };
        }
    }
    out
}

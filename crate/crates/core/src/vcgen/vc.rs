//! Compact block-equation verification conditions.
//!
//! Each block `i` gets a Boolean `blk!i` defined as the weakest
//! precondition of its commands with respect to the conjunction of its
//! successors' block symbols. Each assertion `k` gets a label `lbl!k`
//! defined as its condition and an enable literal `en!k`; the assertion
//! contributes `(lbl!k || !en!k) && (lbl!k ==> Q)`. The VC size is linear
//! in the size of the passive graph.

use std::collections::BTreeMap;

use crate::ir::{Sort, Term};

use super::passify::{PCmd, PassiveGraph};

pub fn block_sym(i: usize) -> String {
    format!("blk!{i}")
}

pub fn label_sym(k: usize) -> String {
    format!("lbl!{k}")
}

pub fn enable_sym(k: usize) -> String {
    format!("en!{k}")
}

pub fn reach_sym(i: usize) -> String {
    format!("rch!{i}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactVc {
    /// `(symbol, definition)` pairs for labels and blocks.
    pub defs: Vec<(String, Term)>,
    /// The VC is valid iff `defs ==> goal`.
    pub goal: Term,
    /// Assertion ordinals in the graph.
    pub assertions: Vec<usize>,
}

impl CompactVc {
    pub fn node_count(&self) -> usize {
        self.defs.iter().map(|(_, t)| 1 + t.node_count()).sum::<usize>() + self.goal.node_count()
    }

    /// Declarations of the Boolean symbols introduced by the encoding.
    pub fn bool_symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = self.defs.iter().map(|(s, _)| s.clone()).collect();
        out.extend(self.assertions.iter().map(|&k| enable_sym(k)));
        out
    }

    pub fn as_term(&self) -> Term {
        let defs = Term::and_all(self.defs.iter().map(|(s, t)| Term::eq(Term::var(s.clone()), t.clone())));
        Term::implies(defs, self.goal.clone())
    }
}

pub fn compact_vc(g: &PassiveGraph) -> CompactVc {
    let mut labels = Vec::new();
    let mut block_defs = vec![Term::Bool(true); g.blocks.len()];
    let mut assertions = Vec::new();
    for b in g.blocks.iter().rev() {
        let mut q = Term::and_all(b.succs.iter().map(|&s| Term::var(block_sym(s))));
        for c in b.cmds.iter().rev() {
            q = match c {
                PCmd::Assume {
                    term: Term::Bool(true), ..
                } => q,
                PCmd::Assume { term, .. } => Term::implies(term.clone(), q),
                PCmd::Assert { term, id, .. } => {
                    let l = Term::var(label_sym(*id));
                    labels.push((label_sym(*id), term.clone()));
                    assertions.push(*id);
                    Term::and(
                        Term::or(l.clone(), Term::not(Term::var(enable_sym(*id)))),
                        Term::implies(l, q),
                    )
                }
            };
        }
        block_defs[b.id] = q;
    }
    labels.sort_by_key(|(s, _)| s.clone());
    assertions.sort_unstable();
    let mut defs = labels;
    defs.extend(block_defs.into_iter().enumerate().rev().map(|(i, t)| (block_sym(i), t)));
    CompactVc {
        defs,
        goal: Term::var(block_sym(g.entry)),
        assertions,
    }
}

/// Reachability of the exit and of each assertion position, treating
/// assertions as no-ops. Used for feasibility (vacuity) checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachEncoding {
    pub defs: Vec<(String, Term)>,
    pub exit: Term,
    pub assertions: BTreeMap<usize, Term>,
}

impl ReachEncoding {
    pub fn bool_symbols(&self) -> Vec<String> {
        self.defs.iter().map(|(s, _)| s.clone()).collect()
    }
}

fn assumes(cmds: &[PCmd]) -> Term {
    Term::and_all(cmds.iter().filter_map(|c| match c {
        PCmd::Assume { term, .. } => Some(term.clone()),
        PCmd::Assert { .. } => None,
    }))
}

pub fn reach_encoding(g: &PassiveGraph) -> ReachEncoding {
    let mut defs = Vec::new();
    let mut assertions = BTreeMap::new();
    for b in &g.blocks {
        let r = if b.id == g.entry {
            Term::Bool(true)
        } else {
            Term::or_all(
                b.preds
                    .iter()
                    .map(|&p| Term::and(Term::var(reach_sym(p)), assumes(&g.blocks[p].cmds))),
            )
        };
        defs.push((reach_sym(b.id), r));
        for (pos, c) in b.cmds.iter().enumerate() {
            if let PCmd::Assert { id, .. } = c {
                assertions.insert(*id, Term::and(Term::var(reach_sym(b.id)), assumes(&b.cmds[..pos])));
            }
        }
    }
    let exit = Term::and(Term::var(reach_sym(g.exit)), assumes(&g.blocks[g.exit].cmds));
    ReachEncoding { defs, exit, assertions }
}

/// Sorts of every non-Boolean-encoding symbol used by a graph.
pub fn graph_symbols(g: &PassiveGraph) -> Vec<(String, Sort)> {
    g.symbols().map(|(s, t)| (s.to_string(), t)).collect()
}

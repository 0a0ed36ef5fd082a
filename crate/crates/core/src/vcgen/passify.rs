//! Dynamic single assignment and passification.

use std::collections::{BTreeMap, HashMap};

use crate::ir::{Sort, Term};
use crate::source::Span;
use crate::weave::{AssumeRole, GuardedBody, HavocSite, Lhs, Origin, VarRole};

use super::cfg::{BCmd, Cfg};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PKind {
    /// Branch guard at the start of an arm.
    Branch,
    /// Definition of fresh incarnations by an assignment.
    Assign,
    Havoc(HavocSite),
    /// Equality added at the end of a predecessor of a join.
    Join,
    /// Length and nullness axioms of fresh array incarnations.
    ArrayAxiom,
    Role(AssumeRole),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PCmd {
    Assume {
        term: Term,
        kind: PKind,
        origin: Option<Origin>,
        defs: Vec<String>,
    },
    Assert {
        term: Term,
        id: usize,
        origin: Origin,
    },
}

impl PCmd {
    pub fn term(&self) -> &Term {
        match self {
            PCmd::Assume { term, .. } | PCmd::Assert { term, .. } => term,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PBlock {
    pub id: usize,
    pub cmds: Vec<PCmd>,
    pub succs: Vec<usize>,
    pub preds: Vec<usize>,
}

/// A storage cell: a scalar variable, or one component of an array variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Value,
    Len,
    Null,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incarnation {
    pub symbol: String,
    /// Unique body variable name.
    pub var: String,
    /// Source-level name.
    pub source: String,
    pub component: Component,
    pub sort: Sort,
    pub block: usize,
    /// Position of the defining command within the block.
    pub position: usize,
    pub span: Option<Span>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IncarnationTable {
    pub incarnations: Vec<Incarnation>,
    by_symbol: HashMap<String, usize>,
    /// Incarnation maps captured by snapshot tags.
    pub snapshots: BTreeMap<String, BTreeMap<(String, Component), String>>,
    /// Incarnations at method entry.
    pub entry: BTreeMap<(String, Component), String>,
    /// Fresh incarnations introduced by each havoc site.
    pub havocs: BTreeMap<HavocSite, Vec<(String, Component, String)>>,
    /// Incarnations current at the start of each block, after joins.
    pub block_in: Vec<BTreeMap<(String, Component), String>>,
    /// Incarnations current at the end of each block.
    pub block_out: Vec<BTreeMap<(String, Component), String>>,
}

impl IncarnationTable {
    pub fn lookup(&self, symbol: &str) -> Option<&Incarnation> {
        self.by_symbol.get(symbol).map(|&i| &self.incarnations[i])
    }

    fn add(&mut self, inc: Incarnation) {
        self.by_symbol.insert(inc.symbol.clone(), self.incarnations.len());
        self.incarnations.push(inc);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassiveGraph {
    pub method: String,
    pub blocks: Vec<PBlock>,
    pub entry: usize,
    pub exit: usize,
    pub table: IncarnationTable,
    pub dropped: Vec<usize>,
}

impl PassiveGraph {
    pub fn symbols(&self) -> impl Iterator<Item = (&str, Sort)> {
        self.table.incarnations.iter().map(|i| (i.symbol.as_str(), i.sort))
    }

    /// Block and position of each assertion.
    pub fn assertion_positions(&self) -> BTreeMap<usize, (usize, usize)> {
        let mut out = BTreeMap::new();
        for b in &self.blocks {
            for (p, c) in b.cmds.iter().enumerate() {
                if let PCmd::Assert { id, .. } = c {
                    out.insert(*id, (b.id, p));
                }
            }
        }
        out
    }
}

type Cells = BTreeMap<(String, Component), String>;

fn components(sort: Sort) -> &'static [(Component, Sort)] {
    match sort {
        Sort::Array => &[
            (Component::Value, Sort::Array),
            (Component::Len, Sort::Int),
            (Component::Null, Sort::Bool),
        ],
        Sort::Int => &[(Component::Value, Sort::Int)],
        Sort::Bool => &[(Component::Value, Sort::Bool)],
    }
}

fn cell_prefix(var: &str, c: Component) -> String {
    match c {
        Component::Value => var.to_string(),
        Component::Len => format!("{var}.len"),
        Component::Null => format!("{var}.null"),
    }
}

struct Passifier<'a> {
    body: &'a GuardedBody,
    table: IncarnationTable,
    counters: HashMap<(String, Component), usize>,
}

impl<'a> Passifier<'a> {
    fn sort(&self, var: &str) -> Sort {
        self.body
            .var(var)
            .map(|v| v.sort)
            .unwrap_or_else(|| panic!("unknown variable `{var}`"))
    }

    fn fresh(&mut self, var: &str, c: Component, block: usize, position: usize, span: Option<Span>) -> String {
        let n = self.counters.entry((var.to_string(), c)).or_insert(0);
        let symbol = format!("{}_{}", cell_prefix(var, c), n);
        *n += 1;
        let info = self.body.var(var).expect("known variable");
        let sort = components(info.sort)
            .iter()
            .find(|(k, _)| *k == c)
            .map(|(_, s)| *s)
            .expect("component");
        self.table.add(Incarnation {
            symbol: symbol.clone(),
            var: var.to_string(),
            source: info.source.clone(),
            component: c,
            sort,
            block,
            position,
            span,
        });
        symbol
    }

    fn cell(&self, cur: &Cells, var: &str, c: Component) -> Term {
        Term::Var(
            cur.get(&(var.to_string(), c))
                .cloned()
                .unwrap_or_else(|| panic!("no incarnation for {var}")),
        )
    }

    fn array_var<'t>(&'t self, t: &'t Term, cur: &'t Cells) -> Option<(&'t str, &'t Cells)> {
        match t {
            Term::Var(v) if self.sort(v) == Sort::Array => Some((v, cur)),
            Term::Old(tag, inner) => {
                let snap = self
                    .table
                    .snapshots
                    .get(tag)
                    .unwrap_or_else(|| panic!("unknown snapshot `{tag}`"));
                self.array_var(inner, snap)
            }
            _ => None,
        }
    }

    fn tr(&self, t: &Term, cur: &Cells) -> Term {
        match t {
            Term::Var(v) => self.cell(cur, v, Component::Value),
            Term::Old(tag, inner) => {
                let snap = self
                    .table
                    .snapshots
                    .get(tag)
                    .unwrap_or_else(|| panic!("unknown snapshot `{tag}`"));
                self.tr(inner, snap)
            }
            Term::Len(a) => match self.array_var(a, cur) {
                Some((v, cells)) => self.cell(cells, v, Component::Len),
                None => panic!("length of a non-variable array term {a}"),
            },
            Term::IsNull(a) => match self.array_var(a, cur) {
                Some((v, cells)) => self.cell(cells, v, Component::Null),
                None => panic!("nullness of a non-variable array term {a}"),
            },
            Term::App(f, args) => {
                let mut out = Vec::new();
                for a in args {
                    match self.array_var(a, cur) {
                        Some((v, cells)) => {
                            for (c, _) in components(Sort::Array) {
                                out.push(self.cell(cells, v, *c));
                            }
                        }
                        None => out.push(self.tr(a, cur)),
                    }
                }
                Term::App(f.clone(), out)
            }
            Term::Int(_) | Term::Bool(_) | Term::Bound(_) => t.clone(),
            Term::Not(a) => Term::Not(Box::new(self.tr(a, cur))),
            Term::Neg(a) => Term::Neg(Box::new(self.tr(a, cur))),
            Term::Wrap32(a) => Term::Wrap32(Box::new(self.tr(a, cur))),
            Term::Bin(op, a, b) => Term::Bin(*op, Box::new(self.tr(a, cur)), Box::new(self.tr(b, cur))),
            Term::Select(a, i) => Term::select(self.tr(a, cur), self.tr(i, cur)),
            Term::Ite(c, a, b) => Term::Ite(
                Box::new(self.tr(c, cur)),
                Box::new(self.tr(a, cur)),
                Box::new(self.tr(b, cur)),
            ),
            Term::Store(a, i, v) => Term::Store(
                Box::new(self.tr(a, cur)),
                Box::new(self.tr(i, cur)),
                Box::new(self.tr(v, cur)),
            ),
            Term::Quant(q, v, body) => Term::Quant(*q, v.clone(), Box::new(self.tr(body, cur))),
        }
    }

    fn array_axiom(len: &str, null: &str) -> Term {
        let len = Term::var(len);
        Term::and(
            Term::le(Term::int(0), len.clone()),
            Term::implies(Term::var(null), Term::eq(len, Term::int(0))),
        )
    }
}

/// Rename every assignment into a fresh incarnation and turn it into an
/// assumption. Blocks are visited once, in id (topological) order.
pub fn passify(body: &GuardedBody, cfg: &Cfg) -> PassiveGraph {
    let mut p = Passifier {
        body,
        table: IncarnationTable::default(),
        counters: HashMap::new(),
    };
    let mut blocks: Vec<PBlock> = cfg
        .blocks
        .iter()
        .map(|b| PBlock {
            id: b.id,
            cmds: Vec::new(),
            succs: b.succs.clone(),
            preds: b.preds.clone(),
        })
        .collect();
    let mut outs: Vec<Cells> = vec![Cells::new(); cfg.blocks.len()];
    let mut ins: Vec<Cells> = vec![Cells::new(); cfg.blocks.len()];

    let mut entry_cells = Cells::new();
    let mut entry_axioms = Vec::new();
    for v in &body.vars {
        for (c, _) in components(v.sort) {
            let s = p.fresh(&v.name, *c, cfg.entry, 0, None);
            entry_cells.insert((v.name.clone(), *c), s);
        }
        if v.sort == Sort::Array && matches!(v.role, VarRole::Param | VarRole::Global) {
            let len = &entry_cells[&(v.name.clone(), Component::Len)];
            let null = &entry_cells[&(v.name.clone(), Component::Null)];
            entry_axioms.push(Passifier::array_axiom(len, null));
        }
    }
    p.table.entry = entry_cells.clone();

    for b in &cfg.blocks {
        let mut cur = if b.id == cfg.entry {
            for ax in entry_axioms.drain(..) {
                blocks[b.id].cmds.push(PCmd::Assume {
                    term: ax,
                    kind: PKind::ArrayAxiom,
                    origin: None,
                    defs: vec![],
                });
            }
            entry_cells.clone()
        } else if b.preds.len() == 1 {
            outs[b.preds[0]].clone()
        } else {
            let mut merged = Cells::new();
            let keys: Vec<_> = outs[b.preds[0]].keys().cloned().collect();
            for key in keys {
                let first = outs[b.preds[0]][&key].clone();
                if b.preds.iter().all(|&q| outs[q][&key] == first) {
                    merged.insert(key, first);
                    continue;
                }
                let s = p.fresh(&key.0, key.1, b.id, 0, None);
                for &q in &b.preds {
                    let eq = Term::eq(Term::var(s.clone()), Term::var(outs[q][&key].clone()));
                    blocks[q].cmds.push(PCmd::Assume {
                        term: eq,
                        kind: PKind::Join,
                        origin: None,
                        defs: vec![],
                    });
                }
                merged.insert(key, s);
            }
            merged
        };
        ins[b.id] = cur.clone();
        let mut cmds = std::mem::take(&mut blocks[b.id].cmds);
        for c in &b.cmds {
            let pos = cmds.len();
            match c {
                BCmd::Assume { term, role, origin } => {
                    let kind = match role {
                        None => PKind::Branch,
                        Some(r) => PKind::Role(*r),
                    };
                    cmds.push(PCmd::Assume {
                        term: p.tr(term, &cur),
                        kind,
                        origin: Some(*origin),
                        defs: vec![],
                    });
                }
                BCmd::Assert { term, id, origin } => {
                    cmds.push(PCmd::Assert {
                        term: p.tr(term, &cur),
                        id: *id,
                        origin: *origin,
                    });
                }
                BCmd::Snapshot { tag } => {
                    p.table.snapshots.insert(tag.clone(), cur.clone());
                }
                BCmd::Assign {
                    lhs: Lhs::Var(x),
                    value,
                    origin,
                } => {
                    let sort = p.sort(x);
                    let span = Some(origin.span);
                    if sort == Sort::Array {
                        let Term::Var(src) = value else {
                            panic!("array assignment from non-variable {value}")
                        };
                        let mut eqs = Vec::new();
                        let mut defs = Vec::new();
                        for (comp, _) in components(Sort::Array) {
                            let rhs = p.cell(&cur, src, *comp);
                            let s = p.fresh(x, *comp, b.id, pos, span);
                            eqs.push(Term::eq(Term::var(s.clone()), rhs));
                            cur.insert((x.clone(), *comp), s.clone());
                            defs.push(s);
                        }
                        cmds.push(PCmd::Assume {
                            term: Term::and_all(eqs),
                            kind: PKind::Assign,
                            origin: Some(*origin),
                            defs,
                        });
                    } else {
                        let rhs = p.tr(value, &cur);
                        let s = p.fresh(x, Component::Value, b.id, pos, span);
                        cur.insert((x.clone(), Component::Value), s.clone());
                        let term = Term::eq(Term::var(s.clone()), rhs);
                        cmds.push(PCmd::Assume {
                            term,
                            kind: PKind::Assign,
                            origin: Some(*origin),
                            defs: vec![s],
                        });
                    }
                }
                BCmd::Assign {
                    lhs: Lhs::Elem(a, idx),
                    value,
                    origin,
                } => {
                    let old = p.cell(&cur, a, Component::Value);
                    let rhs = Term::Store(Box::new(old), Box::new(p.tr(idx, &cur)), Box::new(p.tr(value, &cur)));
                    let s = p.fresh(a, Component::Value, b.id, pos, Some(origin.span));
                    cur.insert((a.clone(), Component::Value), s.clone());
                    let term = Term::eq(Term::var(s.clone()), rhs);
                    cmds.push(PCmd::Assume {
                        term,
                        kind: PKind::Assign,
                        origin: Some(*origin),
                        defs: vec![s],
                    });
                }
                BCmd::Havoc { targets, site, origin } => {
                    let mut fresh = Vec::new();
                    let mut axioms = Vec::new();
                    for t in targets {
                        let sort = p.sort(&t.name);
                        let comps: Vec<Component> = if sort == Sort::Array && t.elements_only {
                            vec![Component::Value]
                        } else {
                            components(sort).iter().map(|(c, _)| *c).collect()
                        };
                        for comp in comps {
                            let s = p.fresh(&t.name, comp, b.id, pos, Some(origin.span));
                            cur.insert((t.name.clone(), comp), s.clone());
                            fresh.push((t.name.clone(), comp, s));
                        }
                        if sort == Sort::Array && !t.elements_only {
                            let len = cur[&(t.name.clone(), Component::Len)].clone();
                            let null = cur[&(t.name.clone(), Component::Null)].clone();
                            axioms.push(Passifier::array_axiom(&len, &null));
                        }
                    }
                    let defs = fresh.iter().map(|(_, _, s)| s.clone()).collect();
                    p.table.havocs.insert(*site, fresh);
                    cmds.push(PCmd::Assume {
                        term: Term::Bool(true),
                        kind: PKind::Havoc(*site),
                        origin: Some(*origin),
                        defs,
                    });
                    for ax in axioms {
                        cmds.push(PCmd::Assume {
                            term: ax,
                            kind: PKind::ArrayAxiom,
                            origin: None,
                            defs: vec![],
                        });
                    }
                }
            }
        }
        blocks[b.id].cmds = cmds;
        outs[b.id] = cur;
    }
    p.table.block_in = ins;
    p.table.block_out = outs;
    PassiveGraph {
        method: body.method.clone(),
        blocks,
        entry: cfg.entry,
        exit: cfg.exit,
        table: p.table,
        dropped: cfg.dropped.clone(),
    }
}

//! Basic-block graph of a guarded body.

use crate::ir::Term;
use crate::weave::{AssumeRole, Cmd, GuardedBody, HavocSite, HavocTarget, Lhs, Origin};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BCmd {
    Assume {
        term: Term,
        role: Option<AssumeRole>,
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
    Snapshot {
        tag: String,
    },
}

impl BCmd {
    /// `role: None` marks the guard assumption at the start of a branch arm.
    pub fn is_branch(&self) -> bool {
        matches!(self, BCmd::Assume { role: None, .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub id: usize,
    pub cmds: Vec<BCmd>,
    pub succs: Vec<usize>,
    pub preds: Vec<usize>,
}

/// Block ids are a topological order: every edge goes from a lower to a
/// higher id. Block 0 is the entry, the last block is the exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub blocks: Vec<Block>,
    pub entry: usize,
    pub exit: usize,
    /// Assertion ordinals that ended up in dead code.
    pub dropped: Vec<usize>,
}

impl Cfg {
    pub fn path_count(&self) -> u128 {
        let mut counts = vec![0u128; self.blocks.len()];
        counts[self.entry] = 1;
        for b in &self.blocks {
            for &s in &b.succs {
                counts[s] += counts[b.id];
            }
        }
        counts[self.exit]
    }
}

struct Builder {
    blocks: Vec<Block>,
    cur: Option<usize>,
    returns: Vec<usize>,
    dropped: Vec<usize>,
}

impl Builder {
    fn new_block(&mut self) -> usize {
        let id = self.blocks.len();
        self.blocks.push(Block {
            id,
            cmds: Vec::new(),
            succs: Vec::new(),
            preds: Vec::new(),
        });
        id
    }

    fn link(&mut self, from: usize, to: usize) {
        self.blocks[from].succs.push(to);
        self.blocks[to].preds.push(from);
    }

    fn emit(&mut self, c: BCmd) {
        match self.cur {
            Some(b) => self.blocks[b].cmds.push(c),
            None => {
                if let BCmd::Assert { id, .. } = c {
                    self.dropped.push(id);
                }
            }
        }
    }

    fn drop_all(&mut self, cmds: &[Cmd]) {
        for c in cmds {
            match c {
                Cmd::Assert { id, .. } => self.dropped.push(*id),
                Cmd::If {
                    then_cmds, else_cmds, ..
                } => {
                    self.drop_all(then_cmds);
                    self.drop_all(else_cmds);
                }
                _ => {}
            }
        }
    }

    fn build(&mut self, cmds: &[Cmd]) {
        for c in cmds {
            match c {
                Cmd::If {
                    cond,
                    then_cmds,
                    else_cmds,
                    origin,
                } => {
                    let Some(b) = self.cur else {
                        self.drop_all(then_cmds);
                        self.drop_all(else_cmds);
                        continue;
                    };
                    let t = self.new_block();
                    let e = self.new_block();
                    self.link(b, t);
                    self.link(b, e);
                    self.blocks[t].cmds.push(BCmd::Assume {
                        term: cond.clone(),
                        role: None,
                        origin: *origin,
                    });
                    self.blocks[e].cmds.push(BCmd::Assume {
                        term: Term::not(cond.clone()),
                        role: None,
                        origin: *origin,
                    });
                    self.cur = Some(t);
                    self.build(then_cmds);
                    let t_end = self.cur;
                    self.cur = Some(e);
                    self.build(else_cmds);
                    let e_end = self.cur;
                    self.cur = match (t_end, e_end) {
                        (None, None) => None,
                        _ => {
                            let j = self.new_block();
                            for end in [t_end, e_end].into_iter().flatten() {
                                self.link(end, j);
                            }
                            Some(j)
                        }
                    };
                }
                Cmd::Return { .. } => {
                    if let Some(b) = self.cur.take() {
                        self.returns.push(b);
                    }
                }
                Cmd::Assume { term, role, origin } => self.emit(BCmd::Assume {
                    term: term.clone(),
                    role: Some(*role),
                    origin: *origin,
                }),
                Cmd::Assert { term, id, origin } => self.emit(BCmd::Assert {
                    term: term.clone(),
                    id: *id,
                    origin: *origin,
                }),
                Cmd::Assign { lhs, value, origin } => self.emit(BCmd::Assign {
                    lhs: lhs.clone(),
                    value: value.clone(),
                    origin: *origin,
                }),
                Cmd::Havoc { targets, site, origin } => self.emit(BCmd::Havoc {
                    targets: targets.clone(),
                    site: *site,
                    origin: *origin,
                }),
                Cmd::Snapshot { tag } => self.emit(BCmd::Snapshot { tag: tag.clone() }),
            }
        }
    }
}

/// Split a guarded body into basic blocks. Returns route to a dedicated exit
/// block when any occur before the end of the body.
pub fn build_cfg(g: &GuardedBody) -> Cfg {
    let mut b = Builder {
        blocks: Vec::new(),
        cur: None,
        returns: Vec::new(),
        dropped: Vec::new(),
    };
    let entry = b.new_block();
    b.cur = Some(entry);
    b.build(&g.cmds);
    if !b.returns.is_empty() {
        let x = b.new_block();
        let mut preds = std::mem::take(&mut b.returns);
        if let Some(end) = b.cur {
            preds.push(end);
        }
        preds.sort_unstable();
        for p in preds {
            b.link(p, x);
        }
        b.cur = Some(x);
    }
    b.build(&g.exit);
    let exit = b.cur.unwrap_or(b.blocks.len() - 1);
    b.dropped.sort_unstable();
    Cfg {
        blocks: b.blocks,
        entry,
        exit,
        dropped: b.dropped,
    }
}

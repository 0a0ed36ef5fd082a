//! Control-flow graph, passification and compact VC generation.

pub mod cfg;
pub mod passify;
pub mod print;
pub mod vc;

pub use cfg::{build_cfg, BCmd, Block, Cfg};
pub use passify::{passify, Component, Incarnation, IncarnationTable, PBlock, PCmd, PKind, PassiveGraph};
pub use print::{print_cfg, print_passive};
pub use vc::{compact_vc, reach_encoding, CompactVc, ReachEncoding};

use crate::ir::Sort;
use crate::typecheck::{Type, TypedProgram};
use crate::weave::GuardedBody;

/// Signature of an uninterpreted function standing for a pure method.
/// Array parameters and globals expand into contents, length and nullness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnSig {
    pub name: String,
    pub args: Vec<Sort>,
    pub ret: Sort,
}

fn push_sorts(ty: Type, out: &mut Vec<Sort>) {
    match ty {
        Type::Int => out.push(Sort::Int),
        Type::Bool => out.push(Sort::Bool),
        Type::IntArray => out.extend([Sort::Array, Sort::Int, Sort::Bool]),
    }
}

pub fn fn_signatures(program: &TypedProgram) -> Vec<FnSig> {
    program
        .methods
        .iter()
        .filter(|m| m.pure)
        .filter_map(|m| {
            let ret = match m.ret?.0 {
                Type::Int => Sort::Int,
                Type::Bool => Sort::Bool,
                Type::IntArray => return None,
            };
            let mut args = Vec::new();
            m.params.iter().for_each(|p| push_sorts(p.ty, &mut args));
            program.globals.iter().for_each(|g| push_sorts(g.ty, &mut args));
            Some(FnSig {
                name: m.name.clone(),
                args,
                ret,
            })
        })
        .collect()
}

/// The three stages in one go.
pub fn generate(body: &GuardedBody) -> (Cfg, PassiveGraph, CompactVc) {
    let cfg = build_cfg(body);
    let graph = passify(body, &cfg);
    let vc = compact_vc(&graph);
    (cfg, graph, vc)
}

//! Interpreter for guarded-command bodies.

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;

use super::eval::{Env, TermEval};
use super::{default_of, Finished, Rac, Stop, MAX_CALL_DEPTH};
use crate::ir::Term;
use crate::value::Val;
use crate::weave::{AssumeRole, Cmd, GuardedBody, HavocSite, Lhs, VarRole, RESULT};

pub(crate) const REPLAY_MISSING: &str = "replay: ";

/// How havoc commands obtain values.
#[derive(Clone, Copy)]
pub enum Policy<'t> {
    /// Loops iterate and callees run.
    Concrete,
    /// Values come from a counterexample model.
    Replay(&'t BTreeMap<HavocSite, Vec<(String, Option<Val>)>>),
}

enum Flow {
    Next,
    Return,
    Back(usize),
}

struct Frame<'b> {
    body: &'b GuardedBody,
    env: Env,
    snapshots: HashMap<String, Env>,
}

pub(crate) fn run(
    rac: &Rac,
    method: &str,
    args: Vec<Val>,
    globals: &BTreeMap<String, Val>,
    policy: Policy,
    depth: usize,
) -> Result<Finished, Stop> {
    let body = rac.body(method)?;
    let mut env = Env::new();
    let mut args = args.into_iter();
    for v in &body.vars {
        let val = match v.role {
            VarRole::Param => args.next().ok_or_else(|| Stop::runtime("missing argument"))?,
            VarRole::Global => globals.get(&v.source).cloned().unwrap_or_else(|| default_of(v.sort)),
            _ => default_of(v.sort),
        };
        env.insert(v.name.clone(), val);
    }
    run_env(rac, body, env, policy, depth)
}

pub(crate) fn run_env(rac: &Rac, body: &GuardedBody, env: Env, policy: Policy, depth: usize) -> Result<Finished, Stop> {
    if depth > MAX_CALL_DEPTH {
        return Err(Stop::not_executable(format!("call depth exceeds {MAX_CALL_DEPTH}")));
    }
    let mut f = Frame {
        body,
        env,
        snapshots: HashMap::new(),
    };
    let ex = Exec { rac, policy, depth };
    match ex.list(&mut f, &body.cmds)? {
        Flow::Next | Flow::Return => {}
        Flow::Back(k) => return Err(Stop::runtime(format!("loop #{k} continued outside its body"))),
    }
    ex.list(&mut f, &body.exit)?;
    let pick = |role: VarRole| -> Vec<(String, Val)> {
        body.vars
            .iter()
            .filter(|v| v.role == role)
            .map(|v| (v.source.clone(), f.env[&v.name].clone()))
            .collect()
    };
    Ok(Finished {
        result: body.var(RESULT).map(|_| f.env[RESULT].clone()),
        params: pick(VarRole::Param).into_iter().map(|(_, v)| v).collect(),
        globals: pick(VarRole::Global).into_iter().collect(),
    })
}

struct Exec<'r, 'p, 't> {
    rac: &'r Rac<'p>,
    policy: Policy<'t>,
    depth: usize,
}

impl Exec<'_, '_, '_> {
    fn eval<'a>(&'a self, f: &'a Frame) -> TermEval<'a> {
        TermEval {
            rac: self.rac,
            env: &f.env,
            snapshots: &f.snapshots,
            depth: self.depth,
            direct: false,
        }
    }

    fn list(&self, f: &mut Frame, cmds: &[Cmd]) -> Result<Flow, Stop> {
        let mut i = 0;
        while i < cmds.len() {
            self.rac.tick()?;
            let flow = self.cmd(f, &cmds[i])?;
            match flow {
                Flow::Next => i += 1,
                Flow::Back(k) => {
                    let head = cmds[..i]
                        .iter()
                        .rposition(|c| matches!(c, Cmd::Havoc { site: HavocSite::Loop(j), .. } if *j == k));
                    match head {
                        // Re-enter the loop just after its havoc.
                        Some(h) => i = h + 1,
                        None => return Ok(Flow::Back(k)),
                    }
                }
                Flow::Return => return Ok(Flow::Return),
            }
        }
        Ok(Flow::Next)
    }

    fn cmd(&self, f: &mut Frame, c: &Cmd) -> Result<Flow, Stop> {
        match c {
            Cmd::Assume { term, role, origin } => {
                if let AssumeRole::LoopBack(k) = role {
                    return match self.policy {
                        Policy::Concrete => Ok(Flow::Back(*k)),
                        Policy::Replay(_) => Err(Stop::NotApplicable),
                    };
                }
                if !self.eval(f).eval_bool(term).map_err(|e| e.at(origin.span))? {
                    return Err(Stop::NotApplicable);
                }
            }
            Cmd::Assert { term, id, origin } => {
                if !self.eval(f).eval_bool(term).map_err(|e| e.at(origin.span))? {
                    let info = &f.body.assertions[*id];
                    return Err(Stop::Violation {
                        id: f.body.assertion_id(*id),
                        kind: info.kind,
                        span: info.span,
                    });
                }
            }
            Cmd::Assign { lhs, value, origin } => {
                let v = self.eval(f).eval_val(value).map_err(|e| e.at(origin.span))?;
                match lhs {
                    Lhs::Var(x) => {
                        f.env.insert(x.clone(), v);
                    }
                    Lhs::Elem(a, idx) => {
                        let i = self.eval(f).eval_val(idx).map_err(|e| e.at(origin.span))?;
                        store(&mut f.env, a, i, v).map_err(|e| e.at(origin.span))?;
                    }
                }
            }
            Cmd::Havoc { site, origin, .. } => match (self.policy, site) {
                (Policy::Concrete, HavocSite::Loop(_)) => {}
                (Policy::Concrete, HavocSite::Call(k)) => self.call(f, *k).map_err(|e| e.at(origin.span))?,
                (Policy::Replay(values), site) => {
                    let vals = values
                        .get(site)
                        .ok_or_else(|| Stop::not_executable(format!("{REPLAY_MISSING}the values chosen at {site}")))?;
                    for (var, v) in vals {
                        let v = v.clone().ok_or_else(|| {
                            Stop::not_executable(format!("{REPLAY_MISSING}the value of `{var}` at {site}"))
                        })?;
                        f.env.insert(var.clone(), v);
                    }
                }
            },
            Cmd::If {
                cond,
                then_cmds,
                else_cmds,
                origin,
            } => {
                let c = self.eval(f).eval_bool(cond).map_err(|e| e.at(origin.span))?;
                return self.list(f, if c { then_cmds } else { else_cmds });
            }
            Cmd::Snapshot { tag } => {
                f.snapshots.insert(tag.clone(), f.env.clone());
            }
            Cmd::Return { .. } => return Ok(Flow::Return),
        }
        Ok(Flow::Next)
    }

    /// Run the callee of call site `k` and copy its effects back.
    fn call(&self, f: &mut Frame, k: usize) -> Result<(), Stop> {
        let site = &f.body.calls[k];
        let callee_body = self.rac.body(&site.callee)?;
        let bound: HashMap<&str, &Term> = site.bindings.iter().map(|(p, t)| (p.as_str(), t)).collect();
        let mut args = Vec::new();
        for v in callee_body.vars.iter().filter(|v| v.role == VarRole::Param) {
            let t = bound
                .get(v.source.as_str())
                .ok_or_else(|| Stop::runtime(format!("unbound parameter {}", v.source)))?;
            args.push(self.eval(f).eval_val(t)?);
        }
        let globals = globals_of(f);
        let out = run(self.rac, &site.callee, args, &globals, Policy::Concrete, self.depth + 1)
            .map_err(|e| e.in_call(&site.callee))?;
        let params: HashMap<String, Val> = callee_body
            .vars
            .iter()
            .filter(|v| v.role == VarRole::Param)
            .map(|v| v.source.clone())
            .zip(out.params)
            .collect();
        for (p, caller) in &site.copy_out {
            f.env.insert(caller.clone(), params[p].clone());
        }
        for v in f.body.vars.iter().filter(|v| v.role == VarRole::Global) {
            if let Some(x) = out.globals.get(&v.source) {
                f.env.insert(v.name.clone(), x.clone());
            }
        }
        if let (Some(r), Some(v)) = (&site.result, out.result) {
            f.env.insert(r.clone(), v);
        }
        Ok(())
    }
}

fn globals_of(f: &Frame) -> BTreeMap<String, Val> {
    f.body
        .vars
        .iter()
        .filter(|v| v.role == VarRole::Global)
        .map(|v| (v.source.clone(), f.env[&v.name].clone()))
        .collect()
}

pub(crate) fn store(env: &mut Env, a: &str, i: Val, v: Val) -> Result<(), Stop> {
    let (Val::Int(i), Val::Int(v)) = (i, v) else {
        return Err(Stop::runtime("ill-typed array store"));
    };
    let Some(Val::Array(Some(items))) = env.get_mut(a) else {
        return Err(Stop::runtime(format!("store into null array `{a}`")));
    };
    let len = items.len();
    let slot = i
        .to_usize()
        .and_then(|k| items.get_mut(k))
        .ok_or_else(|| Stop::runtime(format!("index {i} out of bounds for length {len}")))?;
    *slot = v;
    Ok(())
}

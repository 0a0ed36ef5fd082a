//! Bounded exhaustive testing over small input domains.

use num_bigint::BigInt;

use super::{Inputs, Rac, RunResult};
use crate::typecheck::Type;
use crate::value::Val;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputRanges {
    pub int_lo: i64,
    pub int_hi: i64,
    pub max_len: usize,
    pub elem_lo: i64,
    pub elem_hi: i64,
    /// Upper bound on the number of runs.
    pub budget: usize,
}

impl Default for InputRanges {
    fn default() -> Self {
        InputRanges {
            int_lo: -4,
            int_hi: 4,
            max_len: 3,
            elem_lo: -2,
            elem_hi: 2,
            budget: 200_000,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExhaustiveReport {
    pub method: String,
    pub runs: usize,
    pub normal: usize,
    pub not_applicable: usize,
    /// True when the budget stopped enumeration early.
    pub partial: bool,
    /// Every run that ended in a violation, runtime error or
    /// non-executable construct.
    pub failures: Vec<(Inputs, RunResult)>,
}

impl ExhaustiveReport {
    /// Violations of assertions that belong to the tested method.
    pub fn violations(&self) -> impl Iterator<Item = &(Inputs, RunResult)> {
        self.failures
            .iter()
            .filter(|(_, r)| matches!(r, RunResult::ContractViolation { id, .. } if id.method == self.method))
    }
}

fn domain(ty: Type, nullable: bool, r: &InputRanges) -> Vec<Val> {
    match ty {
        Type::Int => (r.int_lo..=r.int_hi).map(Val::int).collect(),
        Type::Bool => vec![Val::Bool(false), Val::Bool(true)],
        Type::IntArray => {
            let mut out = Vec::new();
            if nullable {
                out.push(Val::Array(None));
            }
            let mut layer: Vec<Vec<BigInt>> = vec![Vec::new()];
            for _ in 0..=r.max_len {
                out.extend(layer.iter().cloned().map(|a| Val::Array(Some(a))));
                layer = layer
                    .iter()
                    .flat_map(|a| {
                        (r.elem_lo..=r.elem_hi).map(move |x| {
                            let mut b = a.clone();
                            b.push(BigInt::from(x));
                            b
                        })
                    })
                    .collect();
            }
            out
        }
    }
}

/// Run `method` on every combination of small parameter and global values.
pub fn exhaustive_test(rac: &Rac, method: &str, ranges: &InputRanges) -> ExhaustiveReport {
    let mut report = ExhaustiveReport {
        method: method.to_string(),
        ..ExhaustiveReport::default()
    };
    let Some(m) = rac.program.method(method) else {
        return report;
    };
    let globals = &rac.program.globals;
    let domains: Vec<Vec<Val>> = m
        .params
        .iter()
        .map(|p| domain(p.ty, p.nullable, ranges))
        .chain(globals.iter().map(|g| domain(g.ty, g.nullable, ranges)))
        .collect();
    let mut counter = vec![0usize; domains.len()];
    loop {
        if report.runs >= ranges.budget {
            report.partial = true;
            break;
        }
        let vals: Vec<Val> = counter.iter().zip(&domains).map(|(&i, d)| d[i].clone()).collect();
        let (args, gs) = vals.split_at(m.params.len());
        let inputs = Inputs {
            args: args.to_vec(),
            globals: globals.iter().map(|g| g.name.clone()).zip(gs.iter().cloned()).collect(),
        };
        report.runs += 1;
        match rac.run(method, &inputs) {
            RunResult::Normal(_) => report.normal += 1,
            RunResult::NotApplicable => report.not_applicable += 1,
            other => report.failures.push((inputs, other)),
        }
        // Advance the mixed-radix counter.
        let mut k = 0;
        loop {
            if k == counter.len() {
                return report;
            }
            counter[k] += 1;
            if counter[k] < domains[k].len() {
                break;
            }
            counter[k] = 0;
            k += 1;
        }
    }
    report
}

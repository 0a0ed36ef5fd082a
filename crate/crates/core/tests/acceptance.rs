//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 1-8 run against the primary solver (`MJV_SOLVER_CMD`, else
//! `z3 -in`). Criterion 9 repeats them with the cvc5 wrapper in `scripts/`
//! and compares every recorded verdict.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use mjv_core::driver::{self, BlockMode, FeasibilityKind, VerificationOutcome};
use mjv_core::ir::{BinaryOp, Sort, Term};
use mjv_core::rac::{exhaustive_test, InputRanges, ReplayError};
use mjv_core::smt::{emit_problem, Problem, Session, Value, VerdictKind};
use mjv_core::{
    ArithmeticMode, Inputs, Rac, RunResult, SolverConfig, SourceUnit, Status, TypedProgram, Val, VerifyOptions,
};

const MODES: [ArithmeticMode; 2] = [ArithmeticMode::Safe, ArithmeticMode::Bigint];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Verdict {
    Decided(String),
    Abstain(String),
}

#[derive(Default)]
struct Report {
    pass: bool,
    summary: String,
    verdicts: BTreeMap<String, Verdict>,
    abstained: Vec<String>,
}

impl Report {
    fn record(&mut self, key: String, v: Verdict) {
        if let Verdict::Abstain(why) = &v {
            self.abstained.push(format!("{key} ({why})"));
        }
        self.verdicts.insert(key, v);
    }
}

struct Ctx {
    solver: SolverConfig,
    /// Unknown answers are abstentions rather than failures.
    lenient: bool,
}

fn root() -> PathBuf {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    p.canonicalize().unwrap_or(p)
}

fn load(path: &str, src: &str) -> TypedProgram {
    let unit = SourceUnit::new(path, src);
    mjv_core::load(&unit).unwrap_or_else(|d| panic!("{path}: {d:?}")).0
}

fn options(cx: &Ctx, mode: ArithmeticMode) -> VerifyOptions {
    VerifyOptions {
        mode,
        solver: cx.solver.clone(),
        feasibility: false,
        ..VerifyOptions::default()
    }
}

fn verify(p: &TypedProgram, opts: &VerifyOptions) -> Vec<VerificationOutcome> {
    driver::verify_program(p, &[], opts).unwrap_or_else(|d| panic!("weave: {d:?}"))
}

fn undecided(o: &VerificationOutcome) -> bool {
    matches!(o.status, Status::Unknown | Status::Timeout | Status::SolverError)
}

fn verdict(o: &VerificationOutcome) -> Verdict {
    if undecided(o) {
        return Verdict::Abstain(o.status.as_str().to_string());
    }
    let ids: BTreeSet<String> = o.violations.iter().map(|v| format!("{}:{}", v.id, v.kind)).collect();
    let ids: Vec<String> = ids.into_iter().collect();
    let mut s = format!("{} [{}]", o.status.as_str(), ids.join(" "));
    if o.partial {
        s.push_str(" partial");
    }
    if !o.feasibility.is_empty() {
        let w: Vec<String> = o
            .feasibility
            .iter()
            .map(|w| format!("{}@{}", w.kind.as_str(), w.span.line))
            .collect();
        s.push_str(&format!(" warn[{}]", w.join(" ")));
    }
    Verdict::Decided(s)
}

struct CorpusRun {
    file: String,
    mode: ArithmeticMode,
    program: TypedProgram,
    outcomes: Vec<VerificationOutcome>,
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(root().join("corpus"))
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "mjml"))
        .collect();
    files.sort();
    files
}

fn run_corpus(cx: &Ctx) -> Vec<CorpusRun> {
    let mut runs = Vec::new();
    for path in corpus_files() {
        let file = path.file_name().unwrap().to_string_lossy().into_owned();
        let src = std::fs::read_to_string(&path).unwrap();
        let program = load(&file, &src);
        for mode in MODES {
            let outcomes = verify(&program, &options(cx, mode));
            runs.push(CorpusRun {
                file: file.clone(),
                mode,
                program: program.clone(),
                outcomes,
            });
        }
    }
    runs
}

fn corpus_key(r: &CorpusRun, method: &str) -> String {
    format!("corpus/{}/{}/{method}", r.file, r.mode.as_str())
}

/// Every method proved valid has no violation among the small inputs.
fn criterion1(cx: &Ctx, runs: &[CorpusRun]) -> Report {
    let mut rep = Report::default();
    let mut files = BTreeSet::new();
    let (mut valid, mut runs_total, mut partial) = (0, 0usize, 0);
    let mut unsound = Vec::new();
    let mut quantified = Vec::new();
    for r in runs {
        files.insert(r.file.clone());
        if r.program
            .methods
            .iter()
            .any(|m| m.requires.iter().chain(&m.ensures).any(|e| e.has_quantifier()))
        {
            quantified.push(r.file.clone());
        }
        let rac = Rac::new(&r.program, r.mode);
        for o in &r.outcomes {
            rep.record(corpus_key(r, &o.method), verdict(o));
            if undecided(o) && !cx.lenient {
                unsound.push(format!("{} undecided: {:?}", corpus_key(r, &o.method), o.message));
            }
            if o.status != Status::Valid {
                continue;
            }
            valid += 1;
            let ex = exhaustive_test(&rac, &o.method, &InputRanges::default());
            runs_total += ex.runs;
            partial += ex.partial as usize;
            let first = ex.violations().next().map(|(inputs, res)| {
                format!(
                    "{}: {} with {}",
                    corpus_key(r, &o.method),
                    res,
                    inputs.describe(&r.program, &o.method)
                )
            });
            unsound.extend(first);
        }
    }
    let methods = runs.iter().map(|r| r.outcomes.len()).sum::<usize>();
    rep.pass = files.len() >= 30 && unsound.is_empty() && quantified.is_empty();
    rep.summary = format!(
        "{} programs, {methods} method verdicts, {valid} valid; {runs_total} exhaustive runs ({partial} budget-capped); {} unsound",
        files.len(),
        unsound.len()
    );
    for u in unsound.iter().take(5) {
        rep.summary.push_str(&format!("\n      {u}"));
    }
    if !quantified.is_empty() {
        rep.summary
            .push_str(&format!("\n      quantified specs in {quantified:?}"));
    }
    rep
}

/// Replaying each counterexample's entry state hits the same assertion.
fn criterion2(runs: &[CorpusRun]) -> Report {
    let mut rep = Report::default();
    let (mut total, mut exempt) = (0, Vec::new());
    let mut wrong = Vec::new();
    for r in runs {
        let rac = Rac::new(&r.program, r.mode);
        for o in &r.outcomes {
            for v in &o.violations {
                total += 1;
                let key = format!("replay/{}/{}/{}", r.file, r.mode.as_str(), v.id);
                match rac.replay(&v.trace) {
                    Ok(RunResult::ContractViolation { id, .. }) if id == v.id => {
                        rep.record(key, Verdict::Decided("reproduced".into()));
                    }
                    Err(ReplayError::Incomplete(why)) => exempt.push(format!("{key}: {why}")),
                    other => wrong.push(format!("{key}: {other:?}")),
                }
            }
        }
    }
    let limit = total as f64 * 0.05;
    rep.pass = total > 0 && wrong.is_empty() && exempt.len() as f64 <= limit;
    rep.summary = format!(
        "{total} violations, {} reproduced, {} exempt (incomplete model, limit {:.1}), {} mismatched",
        total - exempt.len() - wrong.len(),
        exempt.len(),
        limit,
        wrong.len()
    );
    for w in wrong.iter().chain(&exempt).take(5) {
        rep.summary.push_str(&format!("\n      {w}"));
    }
    rep
}

fn diamond_chain(n: usize) -> String {
    let mut body = String::new();
    for i in 0..n {
        let k = i + 1;
        body.push_str(&format!(
            "  if (x > {i}) {{\n    y := y + 1;\n  }} else {{\n    y := y - 1;\n  }}\n  //@ assert -{k} <= y && y <= {k};\n"
        ));
    }
    format!("method chain(x: int): int {{\n  var y: int := 0;\n{body}  return y;\n}}\n")
}

/// VC size grows by a constant per diamond while paths double.
fn criterion3(cx: &Ctx) -> Report {
    let mut rep = Report::default();
    let mut sizes = Vec::new();
    let mut paths = Vec::new();
    for n in 1..=10 {
        let p = load("chain.mjml", &diamond_chain(n));
        let m = p.method("chain").unwrap();
        let prep = driver::prepare(&p, m, ArithmeticMode::Bigint).expect("weave");
        sizes.push(prep.vc.node_count() as f64);
        paths.push(prep.cfg.path_count());
        let o = driver::verify_prepared(&prep, &options(cx, ArithmeticMode::Bigint));
        rep.record(format!("diamonds/{n}"), verdict(&o));
    }
    let diffs: Vec<f64> = sizes.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let spread = diffs.iter().map(|d| (d - mean).abs() / mean).fold(0.0, f64::max);
    let doubling = paths.windows(2).all(|w| w[1] == 2 * w[0]) && paths[0] == 2;
    let all_valid = rep.verdicts.values().all(|v| match v {
        Verdict::Decided(s) => s.starts_with("valid"),
        Verdict::Abstain(_) => cx.lenient,
    });
    rep.pass = spread <= 0.10 && doubling && all_valid;
    rep.summary = format!(
        "node-count steps {:?} (max deviation {:.1}% of mean {mean:.1}); paths {:?}; all chains valid: {all_valid}",
        diffs.iter().map(|d| *d as i64).collect::<Vec<_>>(),
        spread * 100.0,
        paths
    );
    rep
}

fn k_asserts(k: usize, branchy: bool, keep: Option<usize>) -> String {
    let params: Vec<String> = (0..k).map(|i| format!("x{i}: int")).collect();
    let mut body = String::new();
    for i in 0..k {
        let kw = if keep.is_none_or(|j| j == i) {
            "assert"
        } else {
            "assume"
        };
        if branchy {
            body.push_str(&format!("  if (c > {i}) {{\n    //@ {kw} x{i} > 0;\n  }}\n"));
        } else {
            body.push_str(&format!("  //@ {kw} x{i} > 0;\n"));
        }
    }
    format!("method m(c: int, {}) {{\n{body}}}\n", params.join(", "))
}

/// Enumeration finds exactly the independently falsifiable assertions.
fn criterion4(cx: &Ctx) -> Report {
    let mut rep = Report::default();
    let mut bad = Vec::new();
    let mut opts = options(cx, ArithmeticMode::Bigint);
    opts.block_mode = BlockMode::PerAssertion;
    for branchy in [false, true] {
        for k in 1..=3 {
            let shape = if branchy { "branch" } else { "line" };
            let p = load("k.mjml", &k_asserts(k, branchy, None));
            let o = &verify(&p, &opts)[0];
            rep.record(format!("enum/{shape}/{k}"), verdict(o));
            if undecided(o) {
                if !cx.lenient {
                    bad.push(format!("{shape} K={k}: {}", o.status.as_str()));
                }
                continue;
            }
            let found: BTreeSet<_> = o.violations.iter().map(|v| v.id.clone()).collect();
            let found_lines: BTreeSet<u32> = o.violations.iter().map(|v| v.span.line).collect();
            let mut oracle = BTreeSet::new();
            for j in 0..k {
                let single = load("k1.mjml", &k_asserts(k, branchy, Some(j)));
                let oj = &verify(&single, &opts)[0];
                rep.record(format!("enum/{shape}/{k}/only{j}"), verdict(oj));
                if undecided(oj) {
                    continue;
                }
                if oj.violations.len() != 1 {
                    bad.push(format!("{shape} K={k} oracle {j}: {} violations", oj.violations.len()));
                }
                oracle.extend(oj.violations.iter().map(|v| v.span.line));
            }
            if found.len() != k || found_lines != oracle {
                bad.push(format!(
                    "{shape} K={k}: found {} at lines {found_lines:?}, oracle {oracle:?}",
                    found.len()
                ));
            }
        }
    }
    rep.pass = bad.is_empty();
    rep.summary = format!("K=1..3 straight-line and branch-guarded: {} mismatches", bad.len());
    for b in &bad {
        rep.summary.push_str(&format!("\n      {b}"));
    }
    rep
}

const VACUOUS: &str = "\
//@ requires x > 0;
//@ requires x < 0;
//@ ensures \\result > 5;
method vacuous(x: int): int {
  //@ assert x == 3;
  var y: int := 0;
  if (x > 2) {
    //@ assert y == 0;
    y := 1;
  }
  return y;
}
";

const SATISFIABLE: &str = "\
//@ requires x > 0 && x < 10;
//@ ensures \\result >= 0;
method control(x: int): int {
  //@ assert x > 0;
  var y: int := 0;
  if (x > 2) {
    //@ assert y == 0;
    y := 1;
  }
  return y;
}
";

/// Contradictory preconditions make the exit and every assertion infeasible.
fn criterion5(cx: &Ctx) -> Report {
    let mut rep = Report::default();
    let mut opts = options(cx, ArithmeticMode::Bigint);
    opts.feasibility = true;
    let mut detail = Vec::new();
    let mut ok = true;
    for (src, name, expect_vacuous) in [(VACUOUS, "vacuous", true), (SATISFIABLE, "control", false)] {
        let p = load("v.mjml", src);
        let m = p.method(name).unwrap();
        let prep = driver::prepare(&p, m, ArithmeticMode::Bigint).unwrap();
        let o = driver::verify_prepared(&prep, &opts);
        rep.record(format!("vacuity/{name}"), verdict(&o));
        if undecided(&o) || !o.unchecked.is_empty() {
            ok &= cx.lenient;
            detail.push(format!("{name}: undecided"));
            continue;
        }
        let exit = o
            .feasibility
            .iter()
            .filter(|w| w.kind == FeasibilityKind::InfeasibleExit)
            .count();
        let flagged: BTreeSet<_> = o
            .feasibility
            .iter()
            .filter(|w| w.kind == FeasibilityKind::InfeasibleAssertion)
            .filter_map(|w| w.assertion.clone())
            .collect();
        let all: BTreeSet<_> = (0..prep.body.assertions.len())
            .map(|k| prep.body.assertion_id(k))
            .collect();
        if expect_vacuous {
            ok &= exit == 1 && flagged == all;
            detail.push(format!(
                "{name}: infeasible-exit {exit}, infeasible assertions {}/{}",
                flagged.len(),
                all.len()
            ));
        } else {
            ok &= o.feasibility.is_empty() && o.status == Status::Valid;
            detail.push(format!(
                "{name}: {} warnings, {}",
                o.feasibility.len(),
                o.status.as_str()
            ));
        }
    }
    rep.pass = ok;
    rep.summary = detail.join("; ");
    rep
}

const MAX_PLUS_ONE: &str = "\
//@ ensures \\result == RESULT;
method bump(): int {
  var x: int := 2147483647;
  return x + 1;
}
";

fn expect(
    rep: &mut Report,
    cx: &Ctx,
    key: &str,
    o: &VerificationOutcome,
    want: &str,
    detail: &mut Vec<String>,
) -> bool {
    let v = verdict(o);
    rep.record(key.to_string(), v.clone());
    match v {
        Verdict::Decided(s) => {
            detail.push(format!("{key}: {s}"));
            s.starts_with(want)
        }
        Verdict::Abstain(why) => {
            detail.push(format!("{key}: {why}"));
            cx.lenient
        }
    }
}

/// MAX32 + 1 under the three arithmetic modes.
fn criterion6(cx: &Ctx) -> Report {
    let mut rep = Report::default();
    let mut detail = Vec::new();
    let mut ok = true;
    let cases = [
        (ArithmeticMode::Java, "-2147483648", "valid"),
        (ArithmeticMode::Safe, "-2147483648", "violations [bump#0:Overflow"),
        (ArithmeticMode::Bigint, "2147483648", "valid"),
    ];
    for (mode, result, want) in cases {
        let p = load("max.mjml", &MAX_PLUS_ONE.replace("RESULT", result));
        let o = &verify(&p, &options(cx, mode))[0];
        ok &= expect(&mut rep, cx, &format!("modes/{}", mode.as_str()), o, want, &mut detail);
    }
    let safe_kinds: Vec<_> = rep
        .verdicts
        .get("modes/safe")
        .map(|v| format!("{v:?}").matches(":Overflow").count())
        .into_iter()
        .collect();
    ok &= safe_kinds == [1];
    rep.pass = ok;
    rep.summary = detail.join("; ");
    rep
}

/// Division in a precondition needs a proven non-zero divisor.
fn criterion7(cx: &Ctx) -> Report {
    let mut rep = Report::default();
    let mut detail = Vec::new();
    let mut ok = true;
    let cases = [
        ("i / j < 10", "violations [m#0:WellDefinedness]"),
        ("j != 0 && i / j < 10", "valid"),
    ];
    for (req, want) in cases {
        let src = format!("//@ requires {req};\nmethod m(i: int, j: int): int {{\n  return 0;\n}}\n");
        let p = load("wd.mjml", &src);
        let o = &verify(&p, &options(cx, ArithmeticMode::Safe))[0];
        ok &= expect(&mut rep, cx, &format!("wd/{req}"), o, want, &mut detail);
        if want.starts_with("violations") {
            ok &= o.violations.len() == 1;
        }
    }
    rep.pass = ok;
    rep.summary = detail.join("; ");
    rep
}

fn truncating(a: i64, b: i64, op: BinaryOp) -> i64 {
    match op {
        BinaryOp::Div => a / b,
        _ => a % b,
    }
}

/// jdiv/jmod agree with truncating division in the solver and in the
/// interpreter.
fn criterion8(cx: &Ctx) -> Report {
    let mut rep = Report::default();
    let pairs: Vec<(i64, i64)> = (-10..=10)
        .flat_map(|a| (-10..=10).filter(|&b| b != 0).map(move |b| (a, b)))
        .collect();
    let ops = [(BinaryOp::Div, "/"), (BinaryOp::Mod, "%")];

    let mut rac_bad = Vec::new();
    for (op, sym) in ops {
        let p = load(
            "d.mjml",
            &format!("method f(a: int, b: int): int {{\n  return a {sym} b;\n}}\n"),
        );
        let rac = Rac::new(&p, ArithmeticMode::Bigint);
        for &(a, b) in &pairs {
            let r = rac.run("f", &Inputs::new(vec![Val::int(a), Val::int(b)]));
            if r != RunResult::Normal(Some(Val::int(truncating(a, b, op)))) {
                rac_bad.push(format!("{a} {sym} {b} = {r}"));
            }
        }
    }

    let x = Term::var("x");
    let problem = Problem {
        symbols: vec![("x".into(), Sort::Int)],
        definitions: Vec::new(),
        assertions: vec![
            Term::eq(Term::bin(BinaryOp::Div, x.clone(), Term::int(1)), x.clone()),
            Term::eq(Term::bin(BinaryOp::Mod, x.clone(), Term::int(1)), Term::int(0)),
        ],
    };
    let script = emit_problem(&problem, &[], None).expect("emit");
    let mut solver_bad = Vec::new();
    let mut solver_note = String::new();
    let mut answers = Vec::new();
    match Session::start(&cx.solver) {
        Err(e) => solver_note = format!("solver unavailable: {e}"),
        Ok(mut s) => {
            s.send(&script.prelude).expect("prelude");
            for g in &script.goals {
                s.send(&format!("(assert {g})")).expect("goal");
            }
            let v = s.check_sat();
            if v.kind != VerdictKind::Sat {
                solver_note = format!("check-sat answered {}", v.raw);
            } else {
                let terms: Vec<String> = ops
                    .iter()
                    .flat_map(|(op, _)| pairs.iter().map(move |&(a, b)| (*op, a, b)))
                    .map(|(op, a, b)| script.term(&Term::bin(op, Term::int(a), Term::int(b))).unwrap())
                    .collect();
                match s.get_values(&terms) {
                    Err(e) => solver_note = format!("get-value failed: {e}"),
                    Ok(vals) => {
                        let expected = ops
                            .iter()
                            .flat_map(|(op, sym)| pairs.iter().map(move |&(a, b)| (*op, *sym, a, b)));
                        for (val, (op, sym, a, b)) in vals.iter().zip(expected) {
                            let got = Value::from_sexp(val).as_int().cloned();
                            answers.push(format!("{got:?}"));
                            if got != Some(truncating(a, b, op).into()) {
                                solver_bad.push(format!("{a} {sym} {b} -> {val}"));
                            }
                        }
                    }
                }
            }
        }
    }
    let decided = solver_note.is_empty();
    rep.record(
        "division/solver".into(),
        if decided {
            Verdict::Decided(answers.join(","))
        } else {
            Verdict::Abstain(solver_note.clone())
        },
    );
    rep.pass = rac_bad.is_empty() && solver_bad.is_empty() && (decided || cx.lenient);
    rep.summary = format!(
        "{} pairs x 2 ops: interpreter mismatches {}, solver mismatches {}{}",
        pairs.len(),
        rac_bad.len(),
        solver_bad.len(),
        if decided {
            String::new()
        } else {
            format!(" ({solver_note})")
        }
    );
    for b in rac_bad.iter().chain(&solver_bad).take(5) {
        rep.summary.push_str(&format!("\n      {b}"));
    }
    rep
}

fn run_all(cx: &Ctx) -> Vec<(Report, Duration)> {
    let mut out = Vec::new();
    let t = Instant::now();
    let runs = run_corpus(cx);
    let corpus_time = t.elapsed();
    let t = Instant::now();
    out.push((criterion1(cx, &runs), corpus_time + t.elapsed()));
    let t = Instant::now();
    out.push((criterion2(&runs), t.elapsed()));
    let steps: [fn(&Ctx) -> Report; 6] = [criterion3, criterion4, criterion5, criterion6, criterion7, criterion8];
    for f in steps {
        let t = Instant::now();
        out.push((f(cx), t.elapsed()));
    }
    out
}

const TITLES: [&str; 9] = [
    "oracle soundness sweep",
    "counterexample fidelity",
    "compact VC scaling",
    "enumeration completeness",
    "vacuity detection",
    "arithmetic modes",
    "well-definedness",
    "division bridge",
    "solver portability",
];

fn line(n: usize, pass: bool, summary: &str, time: Duration) {
    let mark = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {n} {mark}  {} ({:.1}s): {summary}",
        TITLES[n - 1],
        time.as_secs_f64()
    );
}

fn main() {
    let timeout = Duration::from_secs(30);
    let primary = Ctx {
        solver: SolverConfig::resolve(None).with_timeout(timeout),
        lenient: false,
    };
    let wrapper = root().join("scripts/cvc5-smt2.py");
    let secondary = Ctx {
        solver: SolverConfig::from_command(&format!("python3 {} --mbqi=true", wrapper.display())).with_timeout(timeout),
        lenient: true,
    };
    println!(
        "primary solver: {}; secondary solver: {}",
        primary.solver.command.join(" "),
        secondary.solver.command.join(" ")
    );

    let first = run_all(&primary);
    let mut failed = 0;
    for (i, (rep, time)) in first.iter().enumerate() {
        line(i + 1, rep.pass, &rep.summary, *time);
        failed += !rep.pass as usize;
    }

    let t = Instant::now();
    let second = run_all(&secondary);
    let mut compared = 0;
    let mut disagreements = Vec::new();
    let mut abstentions = Vec::new();
    let mut secondary_failures = Vec::new();
    for (i, ((a, _), (b, _))) in first.iter().zip(&second).enumerate() {
        if !b.pass {
            secondary_failures.push(format!("criterion {} under the second solver: {}", i + 1, b.summary));
        }
        abstentions.extend(a.abstained.iter().map(|s| format!("primary {s}")));
        abstentions.extend(b.abstained.iter().map(|s| format!("secondary {s}")));
        for (key, va) in &a.verdicts {
            match (va, b.verdicts.get(key)) {
                (Verdict::Decided(x), Some(Verdict::Decided(y))) => {
                    compared += 1;
                    if x != y {
                        disagreements.push(format!("{key}: {x} vs {y}"));
                    }
                }
                (_, None) => disagreements.push(format!("{key}: missing under the second solver")),
                _ => {}
            }
        }
    }
    let pass9 = compared > 0 && disagreements.is_empty() && secondary_failures.is_empty();
    let mut summary = format!(
        "{compared} verdicts compared, {} disagreements, {} abstentions flagged",
        disagreements.len(),
        abstentions.len()
    );
    for d in disagreements
        .iter()
        .chain(&secondary_failures)
        .chain(&abstentions)
        .take(12)
    {
        summary.push_str(&format!("\n      {d}"));
    }
    line(9, pass9, &summary, t.elapsed());
    failed += !pass9 as usize;

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

mod common;

use common::{typed, woven};
use mjv_core::arith::ArithmeticMode;
use mjv_core::rac::{exhaustive_test, InputRanges, Rac};
use mjv_core::weave::print::print_body;
use mjv_core::weave::{weave_method, weave_program, AssertKind, AssumeRole, Cmd, GuardedBody, HavocSite};
use proptest::prelude::*;

const SAFE: ArithmeticMode = ArithmeticMode::Safe;

fn asserts(b: &GuardedBody) -> Vec<(AssertKind, String)> {
    let mut out = Vec::new();
    b.for_each_cmd(&mut |c| {
        if let Cmd::Assert { term, id, .. } = c {
            out.push((b.assertions[*id].kind, term.to_string()));
        }
    });
    out
}

fn assumes(b: &GuardedBody) -> Vec<(AssumeRole, String)> {
    let mut out = Vec::new();
    b.for_each_cmd(&mut |c| {
        if let Cmd::Assume { term, role, .. } = c {
            out.push((*role, term.to_string()));
        }
    });
    out
}

#[test]
fn contracts_become_assume_and_assert() {
    let b = woven(
        "//@ requires x > 0;\n//@ ensures \\result > 0;\nmethod m(x: int): int { return x; }",
        "m",
        ArithmeticMode::Bigint,
    );
    assert!(matches!(&b.cmds[0], Cmd::Snapshot { tag } if tag == "pre"));
    assert_eq!(assumes(&b), vec![(AssumeRole::Requires, "(x > 0)".to_string())]);
    assert_eq!(
        asserts(&b),
        vec![(AssertKind::Postcondition, "($result > 0)".to_string())]
    );
}

#[test]
fn pure_method_gets_frame_asserts_for_all_globals() {
    let b = woven(
        "var g: int;\nvar h: int;\n//@ pure\nmethod p(): int { return 1; }",
        "p",
        SAFE,
    );
    let frames: Vec<_> = asserts(&b)
        .into_iter()
        .filter(|(k, _)| *k == AssertKind::Frame)
        .collect();
    assert_eq!(frames.len(), 2);
    assert_eq!(frames[0].1, "(g == old@pre(g))");
}

#[test]
fn default_frame_of_impure_method_is_everything() {
    let b = woven("var g: int;\nmethod m() { g := 1; }", "m", SAFE);
    assert!(asserts(&b).is_empty());
}

#[test]
fn well_definedness_of_unguarded_division() {
    let b = woven("//@ ensures i / j < 10;\nmethod m(i: int, j: int) {}", "m", SAFE);
    let a = asserts(&b);
    assert_eq!(a[0], (AssertKind::WellDefinedness, "!(j == 0)".to_string()));
}

#[test]
fn short_circuit_conditions_guards() {
    let b = woven(
        "//@ ensures j != 0 && i / j < 10;\nmethod m(i: int, j: int) {}",
        "m",
        SAFE,
    );
    assert_eq!(
        asserts(&b)[0],
        (AssertKind::WellDefinedness, "((j != 0) ==> !(j == 0))".to_string())
    );
    let b = woven(
        "//@ ensures j == 0 || i / j < 10;\nmethod m(i: int, j: int) {}",
        "m",
        SAFE,
    );
    assert_eq!(
        asserts(&b)[0],
        (AssertKind::WellDefinedness, "(!(j == 0) ==> !(j == 0))".to_string())
    );
}

#[test]
fn code_guards_keep_their_kind() {
    let b = woven("method m(a: int[], i: int) { a[i] := 0; }", "m", SAFE);
    let kinds: Vec<_> = asserts(&b).into_iter().map(|(k, _)| k).collect();
    assert_eq!(kinds, vec![AssertKind::IndexBounds]);
    let b = woven("method m(a: nullable int[], i: int): int { return a[i]; }", "m", SAFE);
    let kinds: Vec<_> = asserts(&b).into_iter().map(|(k, _)| k).collect();
    assert_eq!(kinds, vec![AssertKind::NullDeref, AssertKind::IndexBounds]);
}

#[test]
fn call_encoding_is_modular() {
    let src = "//@ pure\n//@ ensures \\result == x;\nmethod id(x: int): int { return x; }\nmethod m(): int { var y: int := id(3);\n return y; }";
    let b = woven(src, "m", SAFE);
    let text = print_body(&b);
    assert!(text.contains("$a0_1 := 3") || text.contains("$a0_0 := 3"), "{text}");
    assert!(text.contains("havoc[call#0] $r0"), "{text}");
    assert!(
        assumes(&b)
            .iter()
            .any(|(r, t)| *r == AssumeRole::CallPost && t == "($r0 == $a0_0)"),
        "{text}"
    );
    assert!(text.contains("y := $r0"), "{text}");
    assert_eq!(b.calls.len(), 1);
}

#[test]
fn callee_effects_are_havocked_and_constrained() {
    let src = "var g: int;\n//@ assignable g;\n//@ ensures g == old(g) + 1;\nmethod inc();\nmethod m() { inc(); }";
    let b = woven(src, "m", ArithmeticMode::Bigint);
    let text = print_body(&b);
    assert!(text.contains("havoc[call#0] g"), "{text}");
    assert!(
        assumes(&b).iter().any(|(_, t)| t == "(g == (old@call#0(g) + 1))"),
        "{text}"
    );
}

#[test]
fn callee_precondition_becomes_callpre() {
    let src = "//@ requires x > 0;\nmethod f(x: int) {}\nmethod m(y: int) { f(y); }";
    let b = woven(src, "m", SAFE);
    assert_eq!(asserts(&b), vec![(AssertKind::CallPre, "($a0_0 > 0)".to_string())]);
}

#[test]
fn loops_are_cut() {
    let src = "//@ requires k <= n;\nmethod m(k: int, n: int) {\n var i: int := k;\n //@ invariant i <= n;\n //@ decreases n - i;\n while (i < n) { i := i + 1; }\n}";
    let b = woven(src, "m", ArithmeticMode::Bigint);
    let kinds: Vec<_> = asserts(&b).into_iter().map(|(k, _)| k).collect();
    assert_eq!(
        kinds,
        vec![
            AssertKind::LoopInvEntry,
            AssertKind::LoopInvPreserved,
            AssertKind::DecreasesBound,
            AssertKind::DecreasesDecrease
        ]
    );
    let mut sites = Vec::new();
    b.for_each_cmd(&mut |c| {
        if let Cmd::Havoc { site, targets, .. } = c {
            sites.push((*site, targets.iter().map(|t| t.name.clone()).collect::<Vec<_>>()));
        }
    });
    assert_eq!(sites, vec![(HavocSite::Loop(0), vec!["i".to_string()])]);
    assert!(assumes(&b).iter().any(|(r, _)| *r == AssumeRole::LoopBack(0)));
    // The cut is acyclic: brute force over small inputs finds no violation.
    let p = typed(src);
    let rac = Rac::new(&p, ArithmeticMode::Bigint);
    assert_eq!(
        exhaustive_test(&rac, "m", &InputRanges::default()).violations().count(),
        0
    );
}

#[test]
fn safe_mode_adds_overflow_asserts_in_code_only() {
    let b = woven(
        "//@ ensures \\result == x + 1;\nmethod m(x: int): int { return x + 1; }",
        "m",
        SAFE,
    );
    let kinds: Vec<_> = asserts(&b).into_iter().map(|(k, _)| k).collect();
    assert_eq!(kinds, vec![AssertKind::Overflow, AssertKind::Postcondition]);
    let b = woven("method m(x: int): int { return x + 1; }", "m", ArithmeticMode::Java);
    assert!(
        print_body(&b).contains("$result := wrap32(x + 1)"),
        "{}",
        print_body(&b)
    );
}

#[test]
fn frame_conjunct_fails_exactly_when_unlisted_global_is_written() {
    let src = "var g: int;\nvar h: int;\n//@ assignable g;\nmethod m(c: bool) { g := 1;\n if (c) { h := h + 1; } }";
    let p = typed(src);
    let rac = Rac::new(&p, ArithmeticMode::Bigint);
    let report = exhaustive_test(&rac, "m", &InputRanges::default());
    assert!(report.violations().count() > 0);
    for (inputs, r) in report.violations() {
        assert_eq!(inputs.args[0], mjv_core::value::Val::Bool(true), "{r:?}");
    }
    assert_eq!(report.normal, report.runs / 2);
}

#[test]
fn parameter_in_assignable_is_a_weave_error() {
    let p = typed("//@ assignable x;\nmethod m(x: int) {}");
    let err = weave_method(&p, p.method("m").unwrap(), SAFE).unwrap_err();
    assert!(err.message.contains("parameter"), "{err}");
}

#[test]
fn ordinals_are_dense_and_stable() {
    let src = "//@ requires b != 0;\n//@ ensures \\result == a / b;\nmethod m(a: int, b: int): int { var c: int := a / b;\n //@ assert c * b <= a || a < 0;\n return c; }";
    let p = typed(src);
    let first = weave_program(&p, SAFE);
    let second = weave_program(&p, SAFE);
    let (b1, b2) = (first[0].1.as_ref().unwrap(), second[0].1.as_ref().unwrap());
    assert_eq!(b1, b2);
    for (i, a) in b1.assertions.iter().enumerate() {
        assert_eq!(a.ordinal, i);
    }
}

proptest! {
    #[test]
    fn assertion_keys_are_unique(n in 1usize..6, guard in any::<bool>()) {
        let mut body = String::new();
        for i in 0..n {
            if guard {
                body.push_str(&format!(" if (x > {i}) {{ //@ assert x / (y + {i}) > 0;\n }}\n"));
            } else {
                body.push_str(&format!(" //@ assert x / (y + {i}) > 0;\n"));
            }
        }
        let b = woven(&format!("method m(x: int, y: int) {{\n{body}}}"), "m", SAFE);
        let mut keys: Vec<_> = b.assertions.iter().map(|a| a.key()).collect();
        let total = keys.len();
        keys.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
        keys.dedup();
        prop_assert_eq!(keys.len(), total);
        // Division guard plus the assertion itself; spec arithmetic is unbounded.
        prop_assert_eq!(total, 2 * n);
    }
}

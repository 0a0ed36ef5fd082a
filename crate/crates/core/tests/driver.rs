mod common;

use common::typed;
use mjv_core::arith::ArithmeticMode;
use mjv_core::driver::{verify_program, BlockMode, FeasibilityKind, Status, VerificationOutcome, VerifyOptions};
use mjv_core::weave::AssertKind;

fn check_with(src: &str, opts: &VerifyOptions) -> Vec<VerificationOutcome> {
    verify_program(&typed(src), &[], opts).expect("weaves")
}

fn check(src: &str) -> VerificationOutcome {
    check_with(src, &VerifyOptions::default()).remove(0)
}

fn kinds(o: &VerificationOutcome) -> Vec<AssertKind> {
    o.violations.iter().map(|v| v.kind).collect()
}

#[test]
fn positive_identity_is_valid() {
    let o = check("//@ requires x > 0;\n//@ ensures \\result > 0;\nmethod m(x: int): int { return x; }");
    assert_eq!(o.status, Status::Valid, "{o:?}");
    assert!(o.feasibility.is_empty());
}

#[test]
fn division_by_zero_is_reported() {
    let o = check("method m(x: int): int { return x / 0; }");
    assert_eq!(o.status, Status::Violations);
    assert_eq!(kinds(&o), vec![AssertKind::DivZero]);
}

#[test]
fn contradictory_preconditions_are_vacuous() {
    let o = check("//@ requires x > 0;\n//@ requires x < 0;\nmethod m(x: int): int { //@ assert x == 7;\n return x; }");
    assert_eq!(o.status, Status::Valid);
    let ks: Vec<_> = o.feasibility.iter().map(|w| w.kind).collect();
    assert_eq!(
        ks,
        vec![FeasibilityKind::InfeasibleExit, FeasibilityKind::InfeasibleAssertion]
    );
}

#[test]
fn dead_branch_assertion_is_infeasible() {
    let o = check("method m(x: int) { //@ assume x > 0;\n if (x < 0) { //@ assert x == 3;\n } }");
    assert_eq!(o.status, Status::Valid);
    assert_eq!(o.feasibility.len(), 1);
    assert_eq!(o.feasibility[0].kind, FeasibilityKind::InfeasibleAssertion);
}

#[test]
fn both_arms_feasible() {
    let o = check("method m(c: bool, x: int) { if (c) { //@ assert x == x;\n } else { //@ assert x + 0 == x;\n } }");
    assert_eq!(o.status, Status::Valid);
    assert!(o.feasibility.is_empty(), "{:?}", o.feasibility);
}

#[test]
fn enumerates_three_independent_failures() {
    let o = check("method m(x: int, y: int, z: int) {\n//@ assert x > 0;\n//@ assert y > 0;\n//@ assert z > 0;\n}");
    assert_eq!(o.violations.len(), 3);
    let lines: Vec<u32> = o.violations.iter().map(|v| v.span.line).collect();
    assert_eq!(lines, vec![2, 3, 4]);
}

#[test]
fn per_path_mode_separates_paths() {
    let src = "method m(c: bool, x: int) { var y: int := 0;\n if (c) { y := x; } else { y := x + 1; }\n //@ assert y > 5;\n }";
    let opts = VerifyOptions {
        block_mode: BlockMode::PerPath,
        mode: ArithmeticMode::Bigint,
        ..VerifyOptions::default()
    };
    let o = check_with(src, &opts).remove(0);
    assert_eq!(o.violations.len(), 2);
    assert_ne!(o.violations[0].trace.path, o.violations[1].trace.path);
    let opts = VerifyOptions {
        mode: ArithmeticMode::Bigint,
        ..VerifyOptions::default()
    };
    assert_eq!(check_with(src, &opts)[0].violations.len(), 1);
}

#[test]
fn trace_follows_else_arm() {
    let src = "method m(x: int): int { var y: int := 0;\n if (x > 0) {\n y := 1;\n } else {\n y := 2;\n }\n //@ assert y == 1;\n return y; }";
    let o = check(src);
    assert_eq!(o.violations.len(), 1);
    let t = &o.violations[0].trace;
    let lines: Vec<u32> = t.steps.iter().map(|s| s.span.line).collect();
    assert!(lines.contains(&5) && !lines.contains(&3), "{lines:?}");
    assert_eq!(t.path.literals.len(), 1);
}

#[test]
fn max32_plus_one_in_each_mode() {
    let java = "//@ ensures \\result == -2147483648;\nmethod m(): int { var x: int := 2147483647; return x + 1; }";
    let big = "//@ ensures \\result == 2147483648;\nmethod m(): int { var x: int := 2147483647; return x + 1; }";
    let mode = |m| VerifyOptions {
        mode: m,
        ..VerifyOptions::default()
    };
    assert_eq!(check_with(java, &mode(ArithmeticMode::Java))[0].status, Status::Valid);
    let safe = check_with(java, &mode(ArithmeticMode::Safe)).remove(0);
    assert!(kinds(&safe).contains(&AssertKind::Overflow), "{:?}", kinds(&safe));
    assert_eq!(check_with(big, &mode(ArithmeticMode::Bigint))[0].status, Status::Valid);
}

#[test]
fn well_definedness_of_division_in_specs() {
    let bad = "//@ requires i / j < 10;\nmethod m(i: int, j: int) { }";
    let good = "//@ requires j != 0 && i / j < 10;\nmethod m(i: int, j: int) { }";
    assert_eq!(kinds(&check(bad)), vec![AssertKind::WellDefinedness]);
    assert_eq!(check(good).status, Status::Valid);
}

#[test]
fn missing_solver_is_a_solver_error() {
    let opts = VerifyOptions {
        solver: mjv_core::smt::SolverConfig::from_command("definitely-not-a-solver-binary"),
        ..VerifyOptions::default()
    };
    let o = check_with("method m() { }", &opts).remove(0);
    assert_eq!(o.status, Status::SolverError);
    assert!(o.message.unwrap().contains("definitely-not-a-solver-binary"));
}

#[test]
fn null_test_discharges_nullable_dereference() {
    let guarded = "//@ ensures \\result >= 0;\nmethod m(b: nullable int[]): int {\n if (b == null) { return 0; }\n return b.length;\n}";
    assert_eq!(check(guarded).status, Status::Valid);
    let unguarded = "method m(b: nullable int[]): int {\n return b.length;\n}";
    assert_eq!(kinds(&check(unguarded)), vec![AssertKind::NullDeref]);
}

#[test]
fn array_lengths_fit_in_an_int() {
    let src = "//@ requires 0 <= i && i < a.length;\nmethod m(a: int[], i: int): int {\n return i + 1;\n}";
    assert_eq!(check(src).status, Status::Valid);
    let bigint = VerifyOptions {
        mode: ArithmeticMode::Bigint,
        ..VerifyOptions::default()
    };
    assert_eq!(check_with(src, &bigint)[0].status, Status::Valid);
}

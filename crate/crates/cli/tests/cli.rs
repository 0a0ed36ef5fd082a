use std::path::Path;
use std::process::Command;

use serde_json::Value as Json;

const VALID: &str = "\
//@ requires x > -2147483648;
//@ ensures \\result >= 0;
//@ ensures \\result >= x;
method abs(x: int): int {
  if (x < 0) {
    return -x;
  }
  return x;
}

//@ requires 0 <= n && n <= 1000;
//@ ensures \\result == n + 1;
method inc(n: int): int {
  return n + 1;
}
";

const DIV: &str = "\
//@ requires x >= 0;
method quot(x: int, y: int): int {
  var q: int := x / y;
  return q;
}
";

const DIAMOND: &str = "\
//@ requires d > 0;
method pick(c: bool, d: int): int {
  var r: int := 0;
  if (c) {
    r := 10 / d;
  } else {
    r := 10 / (d - 1);
  }
  return r;
}
";

const ARRAY: &str = "\
//@ requires a.length >= 2;
//@ ensures \\result > 0;
method head(a: int[]): int {
  return a[1];
}
";

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn mjv(dir: &Path, args: &[&str]) -> Out {
    let o = Command::new(env!("CARGO_BIN_EXE_mjv"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn mjv");
    Out {
        code: o.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&o.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
    }
}

fn with_file(name: &str, text: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join(name), text).unwrap();
    dir
}

fn json(o: &Out) -> Json {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}):\n{}", o.stdout))
}

#[test]
fn all_valid_file_exits_zero_with_one_row_per_method() {
    let d = with_file("v.mjml", VALID);
    let o = mjv(d.path(), &["check", "v.mjml"]);
    assert_eq!(o.code, 0, "{}{}", o.stdout, o.stderr);
    let rows: Vec<&str> = o.stdout.lines().skip(1).filter(|l| !l.is_empty()).collect();
    assert_eq!(rows.len(), 2, "{}", o.stdout);
    for (row, name) in rows.iter().zip(["abs", "inc"]) {
        let cols: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(cols[0], name);
        assert_eq!(cols[1], "valid");
        assert_eq!(cols[2], "z3");
    }
    assert!(o.stdout.starts_with("method"));
}

#[test]
fn div_zero_trace_shows_the_models_divisor() {
    let d = with_file("d.mjml", DIV);
    let text = mjv(d.path(), &["check", "d.mjml", "--feasibility", "off"]);
    assert_eq!(text.code, 1);
    let doc = json(&mjv(
        d.path(),
        &["check", "d.mjml", "--feasibility", "off", "--format", "json"],
    ));
    let v = &doc["methods"][0]["violations"][0];
    assert_eq!(v["kind"], "DivZero");
    assert_eq!(v["line"], 3);
    let y = &v["entry-state"]["y"];
    assert_eq!(y, 0);
    let marked = text
        .stdout
        .lines()
        .find(|l| l.trim_start().starts_with('>'))
        .expect("marked line");
    assert!(marked.contains("3 | var q: int := x / y;"), "{marked}");
    assert!(marked.contains(&format!("⊢ y = {y}")), "{marked}");
    let entry = text
        .stdout
        .lines()
        .find(|l| l.trim_start().starts_with("entry"))
        .unwrap();
    assert!(entry.contains("⊢ y = 0"), "{entry}");
}

#[test]
fn branchless_failure_renders_entry_then_one_marked_line() {
    let d = with_file("d.mjml", DIV);
    let o = mjv(d.path(), &["check", "d.mjml", "--feasibility", "off"]);
    let trace: Vec<&str> = o.stdout.lines().skip_while(|l| !l.starts_with("quot#")).collect();
    assert!(trace[1].trim_start().starts_with("entry |"));
    let marked: Vec<&&str> = trace.iter().filter(|l| l.trim_start().starts_with('>')).collect();
    assert_eq!(marked.len(), 1);
    assert!(trace.last().unwrap().trim_start().starts_with('>'));
}

#[test]
fn diamond_else_failure_only_shows_else_arm() {
    let d = with_file("p.mjml", DIAMOND);
    let o = mjv(d.path(), &["check", "p.mjml", "--feasibility", "off"]);
    assert_eq!(o.code, 1, "{}", o.stdout);
    assert!(o.stdout.contains("r := 10 / (d - 1);"));
    assert!(!o.stdout.contains("r := 10 / d;"), "{}", o.stdout);
    assert!(o.stdout.contains("⊢ c = false"));
    assert!(o.stdout.contains("⊢ d = 1"));
}

#[test]
fn array_values_render_with_length() {
    let d = with_file("h.mjml", ARRAY);
    let o = mjv(d.path(), &["check", "h.mjml", "--feasibility", "off"]);
    assert_eq!(o.code, 1);
    let entry = o.stdout.lines().find(|l| l.trim_start().starts_with("entry")).unwrap();
    let re_ok = entry.contains("⊢ a = [") && entry.contains("] (length ");
    assert!(re_ok, "{entry}");
}

#[test]
fn run_reports_violation_as_json_line() {
    let d = with_file("d.mjml", DIV);
    let o = mjv(
        d.path(),
        &[
            "run", "d.mjml", "--entry", "quot", "--arg", "4", "--arg", "0", "--format", "json",
        ],
    );
    assert_eq!(o.code, 1);
    let line: Json = serde_json::from_str(o.stdout.trim()).unwrap();
    assert_eq!(line["result"], "contract-violation");
    assert_eq!(line["kind"], "DivZero");
    assert_eq!(line["assertion-id"], "quot#0");

    let ok = mjv(
        d.path(),
        &["run", "d.mjml", "--entry", "quot", "--arg", "7", "--arg", "-2"],
    );
    assert_eq!(ok.code, 0, "{}{}", ok.stdout, ok.stderr);
    assert!(ok.stdout.contains("\"value\":-3"), "{}", ok.stdout);

    let na = mjv(
        d.path(),
        &["run", "d.mjml", "--entry", "quot", "--arg", "-1", "--arg", "1"],
    );
    assert_eq!(na.code, 1);
    assert!(na.stdout.contains("not-applicable"));
}

#[test]
fn run_parses_arrays_and_globals() {
    let src = "var g: int;\n//@ requires a.length > 0;\nmethod f(a: int[]): int {\n  return a[0] + g;\n}\n";
    let d = with_file("g.mjml", src);
    let o = mjv(
        d.path(),
        &["run", "g.mjml", "--entry", "f", "--arg", "[5, 6]", "--global", "g=-2"],
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("\"value\":3"));
    let bad = mjv(d.path(), &["run", "g.mjml", "--entry", "f", "--arg", "null"]);
    assert_eq!(bad.code, 2);
    let arity = mjv(d.path(), &["run", "g.mjml", "--entry", "f"]);
    assert_eq!(arity.code, 2);
}

#[test]
fn usage_errors_exit_two() {
    let d = with_file("v.mjml", VALID);
    assert_eq!(mjv(d.path(), &["check", "v.mjml", "--no-such-flag"]).code, 2);
    assert_eq!(mjv(d.path(), &["check", "v.mjml", "--mode", "float"]).code, 2);
    assert_eq!(mjv(d.path(), &["check"]).code, 2);
    assert_eq!(mjv(d.path(), &["frobnicate"]).code, 2);
    assert_eq!(mjv(d.path(), &["check", "missing.mjml"]).code, 2);
    assert_eq!(mjv(d.path(), &["--help"]).code, 0);
}

#[test]
fn parse_and_type_errors_exit_two() {
    let d = with_file("bad.mjml", "method f(x: int): int {\n  return x +;\n}\n");
    let o = mjv(d.path(), &["check", "bad.mjml"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("bad.mjml:2:"), "{}", o.stderr);

    let d = with_file("ty.mjml", "method f(x: int): int {\n  return true;\n}\n");
    let o = mjv(d.path(), &["typecheck", "ty.mjml", "--format", "json"]);
    assert_eq!(o.code, 2);
    let doc = json(&o);
    assert!(doc["diagnostics"][0]["code"].as_str().unwrap().starts_with("TYPE"));

    let d = with_file("v.mjml", VALID);
    let o = mjv(d.path(), &["typecheck", "v.mjml"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("v.mjml: ok"));
}

#[test]
fn unavailable_solver_exits_three() {
    let d = with_file("v.mjml", VALID);
    let o = mjv(
        d.path(),
        &["check", "v.mjml", "--solver-cmd", "/nonexistent/solver -in"],
    );
    assert_eq!(o.code, 3, "{}", o.stdout);
    assert!(o.stdout.contains("solver-error"));
}

#[test]
fn solver_env_variable_is_a_fallback() {
    let d = with_file("v.mjml", VALID);
    let o = Command::new(env!("CARGO_BIN_EXE_mjv"))
        .current_dir(d.path())
        .env("MJV_SOLVER_CMD", "/nonexistent/solver")
        .args(["check", "v.mjml"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_mjv"))
        .current_dir(d.path())
        .env("MJV_SOLVER_CMD", "/nonexistent/solver")
        .args(["check", "v.mjml", "--solver-cmd", "z3 -in"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn method_filter_verifies_exactly_the_named_methods() {
    let d = with_file("v.mjml", VALID);
    let dump = d.path().join("smt");
    let o = mjv(
        d.path(),
        &[
            "check",
            "v.mjml",
            "--method",
            "inc",
            "--dump-smt",
            dump.to_str().unwrap(),
        ],
    );
    assert_eq!(o.code, 0);
    let mut names: Vec<String> = std::fs::read_dir(&dump)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert!(names.contains(&"inc.main.smt2".to_string()), "{names:?}");
    assert!(names.iter().all(|n| n.starts_with("inc.")), "{names:?}");
    assert_eq!(o.stdout.lines().count(), 2);
}

#[test]
fn feasibility_warnings_exit_one() {
    let src = "//@ requires x > 0 && x < 0;\n//@ ensures \\result == 1;\nmethod f(x: int): int {\n  return 1;\n}\n";
    let d = with_file("f.mjml", src);
    let o = mjv(d.path(), &["check", "f.mjml"]);
    assert_eq!(o.code, 1, "{}", o.stdout);
    assert!(o.stdout.contains("infeasible-exit"));
    assert_eq!(mjv(d.path(), &["check", "f.mjml", "--feasibility", "off"]).code, 0);
}

#[test]
fn arithmetic_mode_flag() {
    let src =
        "//@ ensures \\result == -2147483648;\nmethod f(): int {\n  var x: int := 2147483647;\n  return x + 1;\n}\n";
    let d = with_file("m.mjml", src);
    assert_eq!(mjv(d.path(), &["check", "m.mjml", "--mode", "java"]).code, 0);
    let safe = mjv(d.path(), &["check", "m.mjml", "--mode", "safe"]);
    assert_eq!(safe.code, 1);
    assert!(safe.stdout.contains("Overflow"));
}

#[test]
fn dump_ir_prints_each_stage() {
    let d = with_file("v.mjml", VALID);
    let o = mjv(d.path(), &["check", "v.mjml", "--method", "inc", "--dump-ir", "on"]);
    for header in ["== inc : guarded body ==", "== inc : cfg ==", "== inc : passive =="] {
        assert!(o.stdout.contains(header), "{}", o.stdout);
    }
    let j = mjv(d.path(), &["check", "v.mjml", "--dump-ir", "on", "--format", "json"]);
    json(&j);
    assert!(j.stderr.contains("guarded body"));
}

#[test]
fn json_matches_across_worker_counts_and_block_modes() {
    let d = with_file("p.mjml", DIAMOND);
    let strip = |mut v: Json| {
        for m in v["methods"].as_array_mut().unwrap() {
            m.as_object_mut().unwrap().remove("time-ms");
        }
        v
    };
    let a = strip(json(&mjv(
        d.path(),
        &["check", "p.mjml", "--format", "json", "--workers", "1"],
    )));
    let b = strip(json(&mjv(
        d.path(),
        &["check", "p.mjml", "--format", "json", "--workers", "4"],
    )));
    assert_eq!(a, b);
    let per_path = json(&mjv(
        d.path(),
        &["check", "p.mjml", "--format", "json", "--block-mode", "per-path"],
    ));
    assert_eq!(per_path["methods"][0]["status"], "violations");
    let capped = json(&mjv(
        d.path(),
        &["check", "p.mjml", "--format", "json", "--max-violations", "1"],
    ));
    assert_eq!(capped["methods"][0]["violations"].as_array().unwrap().len(), 1);
    let single = json(&mjv(
        d.path(),
        &["check", "p.mjml", "--format", "json", "--enumerate", "off"],
    ));
    assert_eq!(single["methods"][0]["violations"].as_array().unwrap().len(), 1);
}

#[test]
fn several_files_give_a_json_array() {
    let d = with_file("v.mjml", VALID);
    std::fs::write(d.path().join("d.mjml"), DIV).unwrap();
    let o = mjv(
        d.path(),
        &["check", "v.mjml", "d.mjml", "--format", "json", "--feasibility", "off"],
    );
    assert_eq!(o.code, 1);
    let doc = json(&o);
    assert_eq!(doc.as_array().unwrap().len(), 2);
    assert_eq!(doc[1]["file"], "d.mjml");
}

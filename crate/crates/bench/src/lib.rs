//! Program generators shared by the benchmarks.

use std::fmt::Write as _;

/// `n` sequential if/else diamonds, each followed by an assertion.
pub fn diamond_chain(n: usize) -> String {
    let mut body = String::new();
    for i in 0..n {
        let k = i + 1;
        let _ = writeln!(
            body,
            "  if (x > {i}) {{\n    y := y + 1;\n  }} else {{\n    y := y - 1;\n  }}"
        );
        let _ = writeln!(body, "  //@ assert -{k} <= y && y <= {k};");
    }
    format!("method chain(x: int): int {{\n  var y: int := 0;\n{body}  return y;\n}}\n")
}

/// `n` small methods with loops, calls and array accesses.
pub fn mixed_unit(n: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        let _ = write!(
            out,
            "//@ requires 0 <= k && k <= 100;
//@ ensures \\result == 2 * k;
method twice{i}(k: int): int {{
  var j: int := 0;
  var s: int := 0;
  //@ invariant 0 <= j && j <= k && s == 2 * j;
  //@ decreases k - j;
  while (j < k) {{
    j := j + 1;
    s := s + 2;
  }}
  return s;
}}

//@ requires 0 <= i && i < a.length && a.length < 50;
//@ assignable a[*];
//@ ensures a[i] == \\old(a[i]) + 1 || \\old(a[i]) >= 1000;
method bump{i}(a: int[], i: int) {{
  if (a[i] < 1000) {{
    a[i] := a[i] + 1;
  }}
}}

"
        );
    }
    out
}

#![allow(dead_code)]

use mjv_core::arith::ArithmeticMode;
use mjv_core::frontend::parse_unit;
use mjv_core::typecheck::{check_program, TypedProgram};
use mjv_core::weave::{weave_method, GuardedBody};
use mjv_core::SourceUnit;

pub fn typed(src: &str) -> TypedProgram {
    let unit = SourceUnit::new("test.mjml", src);
    let ast = parse_unit(&unit).unwrap_or_else(|d| panic!("parse errors: {d:?}"));
    check_program(&ast).unwrap_or_else(|d| panic!("type errors: {d:?}")).0
}

pub fn woven(src: &str, method: &str, mode: ArithmeticMode) -> GuardedBody {
    let p = typed(src);
    let m = p.method(method).expect("method");
    weave_method(&p, m, mode).expect("weave")
}

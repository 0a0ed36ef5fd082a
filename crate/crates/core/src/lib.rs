//! Deductive verifier and runtime contract checker for MiniJML.

pub mod arith;
pub mod diag;
pub mod driver;
pub mod frontend;
pub mod ir;
pub mod rac;
pub mod smt;
pub mod source;
pub mod typecheck;
pub mod value;
pub mod vcgen;
pub mod weave;

pub use arith::ArithmeticMode;
pub use diag::{Diagnostic, Severity};
pub use driver::{CounterexampleTrace, Status, VerificationOutcome, VerifyOptions};
pub use rac::{Inputs, Rac, RunResult};
pub use smt::SolverConfig;
pub use source::{SourceUnit, Span};
pub use typecheck::{Type, TypedProgram};
pub use value::Val;
pub use weave::{AssertKind, AssertionId};

/// Parse and check one unit. Warnings come back with the program.
pub fn load(unit: &SourceUnit) -> Result<(TypedProgram, Vec<Diagnostic>), Vec<Diagnostic>> {
    let ast = frontend::parse_unit(unit)?;
    typecheck::check_program(&ast)
}

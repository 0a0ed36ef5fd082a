//! SMT-LIB emission and solver sessions.

pub mod config;
pub mod emit;
pub mod model;
pub mod session;
pub mod sexp;

pub use config::{SolverConfig, DEFAULT_SOLVER, SOLVER_ENV};
pub use emit::{emit_problem, sanitize, term_to_smt, EmitError, Problem, Script, SymbolMap};
pub use model::{ModelValues, Value};
pub use session::{Session, SessionError, SolverVerdict, VerdictKind};
pub use sexp::{ProtocolError, Sexp};

//! Name resolution, typing, purity and nullity defaults.

mod check;
pub mod nullity;
pub mod purity;
pub mod typed;

pub use check::resolve_and_check;
pub use nullity::apply_nullity_defaults;
pub use purity::check_spec_purity;
pub use typed::*;

use crate::diag::Diagnostic;
use crate::frontend::ast::Program;

/// Full front half of the pipeline: resolve, check purity, apply nullity.
/// Warnings are returned alongside a successful result.
pub fn check_program(p: &Program) -> Result<(TypedProgram, Vec<Diagnostic>), Vec<Diagnostic>> {
    let typed = resolve_and_check(p)?;
    let diags = check_spec_purity(&typed);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    Ok((apply_nullity_defaults(typed), diags))
}

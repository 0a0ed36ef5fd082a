//! Diagnostics shared by the lexer, parser and checker.

use std::fmt;

use serde::Serialize;

use crate::source::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A located message with a stable code (e.g. `TYPE001`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: &'static str, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn warning(code: &'static str, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {}[{}]: {}", self.span, sev, self.code, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// Stable diagnostic codes.
pub mod codes {
    pub const LEX_UNTERMINATED_COMMENT: &str = "LEX001";
    pub const LEX_ILLEGAL_CHAR: &str = "LEX002";
    pub const LEX_BAD_INT: &str = "LEX003";

    pub const PARSE_UNEXPECTED: &str = "PARSE001";
    pub const PARSE_DUPLICATE_ASSIGNABLE: &str = "PARSE002";
    pub const PARSE_PURE_ASSIGNABLE: &str = "PARSE003";
    pub const PARSE_MULTIPLE_BINDERS: &str = "PARSE004";
    pub const PARSE_DANGLING_LOOP_SPEC: &str = "PARSE005";

    pub const TYPE_BOOL_EXPECTED: &str = "TYPE001";
    pub const TYPE_MISMATCH: &str = "TYPE002";
    pub const TYPE_UNRESOLVED: &str = "TYPE003";
    pub const TYPE_RESULT_PLACEMENT: &str = "TYPE004";
    pub const TYPE_OLD_PLACEMENT: &str = "TYPE005";
    pub const TYPE_ARITY: &str = "TYPE006";
    pub const TYPE_DUPLICATE: &str = "TYPE007";
    pub const TYPE_IMMUTABLE: &str = "TYPE008";
    pub const TYPE_CALL_POSITION: &str = "TYPE009";
    pub const TYPE_MISSING_RETURN: &str = "TYPE010";
    pub const TYPE_BAD_STORE_REF: &str = "TYPE011";
    pub const TYPE_ALIASING: &str = "TYPE012";
    pub const TYPE_RETURN: &str = "TYPE013";
    pub const TYPE_QUANT_POSITION: &str = "TYPE014";

    pub const PURITY_CALL_IN_SPEC: &str = "PURITY001";
    pub const PURITY_SIDE_EFFECT: &str = "PURITY002";
}

//! Non-null default for array-typed declarations.

use super::typed::*;

/// Record implicit `!= null` facts for every array parameter and global not
/// marked `nullable`. Recomputes from declarations, so applying twice is the
/// same as applying once.
pub fn apply_nullity_defaults(mut p: TypedProgram) -> TypedProgram {
    p.implicit_global_nonnull = p
        .globals
        .iter()
        .filter(|g| g.ty == Type::IntArray && !g.nullable)
        .map(|g| NonNullFact {
            var: g.name.clone(),
            span: g.span,
        })
        .collect();
    for m in &mut p.methods {
        m.implicit_nonnull = m
            .params
            .iter()
            .filter(|q| q.ty == Type::IntArray && !q.nullable)
            .map(|q| NonNullFact {
                var: q.name.clone(),
                span: q.span,
            })
            .collect();
    }
    p.nullity_applied = true;
    p
}

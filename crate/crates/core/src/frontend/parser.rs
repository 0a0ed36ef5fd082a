//! Recursive-descent parser with statement-level error recovery.

use crate::diag::{codes, Diagnostic};
use crate::source::Span;

use super::ast::*;
use super::lexer::{Token, TokenKind};

type PResult<T> = Result<T, ()>;

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    errors: Vec<Diagnostic>,
}

fn starts_clause(kind: &TokenKind) -> bool {
    matches!(
        kind,
        TokenKind::Requires
            | TokenKind::Ensures
            | TokenKind::Assignable
            | TokenKind::Pure
            | TokenKind::Invariant
            | TokenKind::Decreases
            | TokenKind::Assert
            | TokenKind::Assume
            | TokenKind::Method
    )
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == kind
    }

    fn bump(&mut self) -> &Token {
        let tok = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&mut self, expected: &str) {
        let found = self.peek().clone();
        let span = self.span();
        self.errors.push(Diagnostic::error(
            codes::PARSE_UNEXPECTED,
            span,
            format!("expected {expected}, found {found}"),
        ));
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.bump().span)
        } else {
            self.error_here(&kind.to_string());
            Err(())
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        if let TokenKind::Ident(name) = self.peek() {
            let name = name.clone();
            let span = self.bump().span;
            Ok(Ident { name, span })
        } else {
            self.error_here("identifier");
            Err(())
        }
    }

    /// Skip to a plausible restart point: just past `;`, or before `}`, a
    /// clause keyword, or end of input.
    fn sync(&mut self) {
        loop {
            match self.peek() {
                TokenKind::Eof | TokenKind::RBrace => return,
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                k if starts_clause(k) => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    // ---- top level -------------------------------------------------------

    fn program(&mut self) -> Program {
        let mut program = Program::default();
        let mut pending: Vec<SpecClause> = Vec::new();
        let mut pending_pure: Option<Span> = None;
        let mut pending_start: Option<Span> = None;
        while !self.at(&TokenKind::Eof) {
            let before = self.pos;
            let ok = match self.peek().clone() {
                TokenKind::Invariant => {
                    let start = self.bump().span;
                    self.expr().and_then(|expr| {
                        let end = self.expect(TokenKind::Semi)?;
                        program.invariants.push(GlobalInvariant {
                            expr,
                            span: start.to(end),
                        });
                        Ok(())
                    })
                }
                TokenKind::Requires | TokenKind::Ensures | TokenKind::Assignable | TokenKind::Pure => {
                    let start = self.span();
                    pending_start.get_or_insert(start);
                    self.method_clause(&mut pending, &mut pending_pure)
                }
                TokenKind::Var => {
                    if !pending.is_empty() || pending_pure.is_some() {
                        let span = self.span();
                        self.errors.push(Diagnostic::error(
                            codes::PARSE_UNEXPECTED,
                            span,
                            "method specification clauses must precede a method",
                        ));
                        pending.clear();
                        pending_pure = None;
                        pending_start = None;
                    }
                    self.global().map(|g| program.globals.push(g))
                }
                TokenKind::Method => {
                    let specs = std::mem::take(&mut pending);
                    let pure = pending_pure.take();
                    let start = pending_start.take();
                    self.method(specs, pure, start).map(|m| program.methods.push(m))
                }
                _ => {
                    self.error_here("`method`, `var`, or a specification clause");
                    Err(())
                }
            };
            if ok.is_err() {
                self.sync();
                if self.pos == before || self.at(&TokenKind::RBrace) {
                    self.bump();
                }
            }
        }
        if !pending.is_empty() || pending_pure.is_some() {
            let span = self.span();
            self.errors.push(Diagnostic::error(
                codes::PARSE_UNEXPECTED,
                span,
                "method specification clauses must precede a method",
            ));
        }
        program
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let start = self.span();
        let nullable = self.eat(&TokenKind::Nullable);
        let base = match self.peek() {
            TokenKind::IntTy => {
                self.bump();
                if self.at(&TokenKind::LBracket) {
                    self.bump();
                    self.expect(TokenKind::RBracket)?;
                    BaseType::IntArray
                } else {
                    BaseType::Int
                }
            }
            TokenKind::BoolTy => {
                self.bump();
                BaseType::Bool
            }
            _ => {
                self.error_here("type");
                return Err(());
            }
        };
        Ok(TypeRef {
            base,
            nullable,
            span: start.to(self.prev_span()),
        })
    }

    fn global(&mut self) -> PResult<GlobalDecl> {
        let start = self.expect(TokenKind::Var)?;
        let name = self.ident()?;
        self.expect(TokenKind::Colon)?;
        let ty = self.type_ref()?;
        let end = self.expect(TokenKind::Semi)?;
        Ok(GlobalDecl {
            name,
            ty,
            span: start.to(end),
        })
    }

    fn method_clause(&mut self, specs: &mut Vec<SpecClause>, pure: &mut Option<Span>) -> PResult<()> {
        match self.peek() {
            TokenKind::Requires => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::Semi)?;
                specs.push(SpecClause::Requires(e));
            }
            TokenKind::Ensures => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::Semi)?;
                specs.push(SpecClause::Ensures(e));
            }
            TokenKind::Assignable => {
                let start = self.bump().span;
                let mut refs = vec![self.store_ref()?];
                while self.eat(&TokenKind::Comma) {
                    refs.push(self.store_ref()?);
                }
                let end = self.expect(TokenKind::Semi)?;
                let span = start.to(end);
                if specs.iter().any(|c| matches!(c, SpecClause::Assignable(..))) {
                    self.errors.push(Diagnostic::error(
                        codes::PARSE_DUPLICATE_ASSIGNABLE,
                        span,
                        "at most one assignable clause is allowed per method",
                    ));
                } else {
                    specs.push(SpecClause::Assignable(refs, span));
                }
            }
            TokenKind::Pure => {
                let span = self.bump().span;
                self.eat(&TokenKind::Semi);
                *pure = Some(span);
            }
            _ => {
                self.error_here("specification clause");
                return Err(());
            }
        }
        Ok(())
    }

    fn store_ref(&mut self) -> PResult<StoreRef> {
        match self.peek() {
            TokenKind::BsEverything => Ok(StoreRef::Everything(self.bump().span)),
            TokenKind::BsNothing => Ok(StoreRef::Nothing(self.bump().span)),
            _ => {
                let id = self.ident()?;
                if !self.eat(&TokenKind::LBracket) {
                    return Ok(StoreRef::Name(id));
                }
                if self.eat(&TokenKind::Star) {
                    self.expect(TokenKind::RBracket)?;
                    return Ok(StoreRef::AllElements(id));
                }
                let lo = self.expr()?;
                self.expect(TokenKind::DotDot)?;
                let hi = self.expr()?;
                self.expect(TokenKind::RBracket)?;
                Ok(StoreRef::Range(id, lo, hi))
            }
        }
    }

    fn method(&mut self, specs: Vec<SpecClause>, pure: Option<Span>, start: Option<Span>) -> PResult<MethodDecl> {
        let kw = self.expect(TokenKind::Method)?;
        let name = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                let pname = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let ty = self.type_ref()?;
                params.push(Param { name: pname, ty });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        let ret = if self.eat(&TokenKind::Colon) {
            Some(self.type_ref()?)
        } else {
            None
        };
        let body = if self.eat(&TokenKind::Semi) {
            None
        } else {
            Some(self.block()?)
        };
        if let (Some(pspan), Some(SpecClause::Assignable(_, aspan))) =
            (pure, specs.iter().find(|c| matches!(c, SpecClause::Assignable(..))))
        {
            let _ = pspan;
            self.errors.push(Diagnostic::error(
                codes::PARSE_PURE_ASSIGNABLE,
                *aspan,
                "a pure method cannot have an assignable clause",
            ));
        }
        let span = start.unwrap_or(kw).to(self.prev_span());
        Ok(MethodDecl {
            name,
            params,
            ret,
            pure: pure.is_some(),
            specs,
            body,
            span,
        })
    }

    // ---- statements ------------------------------------------------------

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at(&TokenKind::RBrace) && !self.at(&TokenKind::Eof) {
            let before = self.pos;
            match self.stmt() {
                Ok(s) => stmts.push(s),
                Err(()) => {
                    self.sync();
                    if self.pos == before {
                        self.bump();
                    }
                }
            }
        }
        let end = self.expect(TokenKind::RBrace)?;
        Ok(Block {
            stmts,
            span: start.to(end),
        })
    }

    fn loop_specs(&mut self, invariants: &mut Vec<Expr>, decreases: &mut Option<Expr>) -> PResult<()> {
        loop {
            match self.peek() {
                TokenKind::Invariant => {
                    self.bump();
                    let e = self.expr()?;
                    self.expect(TokenKind::Semi)?;
                    invariants.push(e);
                }
                TokenKind::Decreases => {
                    let span = self.bump().span;
                    let e = self.expr()?;
                    self.expect(TokenKind::Semi)?;
                    if decreases.is_some() {
                        self.errors.push(Diagnostic::error(
                            codes::PARSE_UNEXPECTED,
                            span,
                            "at most one decreases clause is allowed per loop",
                        ));
                    } else {
                        *decreases = Some(e);
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.span();
        let kind = match self.peek().clone() {
            TokenKind::Var => {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let ty = self.type_ref()?;
                self.expect(TokenKind::Assign)?;
                let init = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::VarDecl { name, ty, init }
            }
            TokenKind::If => return self.if_stmt(),
            TokenKind::Invariant | TokenKind::Decreases | TokenKind::While => {
                let mut invariants = Vec::new();
                let mut decreases = None;
                self.loop_specs(&mut invariants, &mut decreases)?;
                if !self.at(&TokenKind::While) {
                    let span = self.span();
                    self.errors.push(Diagnostic::error(
                        codes::PARSE_DANGLING_LOOP_SPEC,
                        span,
                        "loop specification must be followed by `while`",
                    ));
                    return Err(());
                }
                self.bump();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                self.loop_specs(&mut invariants, &mut decreases)?;
                let body = self.block()?;
                StmtKind::While {
                    cond,
                    invariants,
                    decreases,
                    body,
                }
            }
            TokenKind::Return => {
                self.bump();
                let value = if self.at(&TokenKind::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(TokenKind::Semi)?;
                StmtKind::Return(value)
            }
            TokenKind::Assert => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Assert(e)
            }
            TokenKind::Assume => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Assume(e)
            }
            TokenKind::LBrace => StmtKind::Block(self.block()?),
            TokenKind::Ident(_) => {
                if self.peek_at(1) == &TokenKind::LParen {
                    let callee = self.ident()?;
                    let args = self.call_args()?;
                    self.expect(TokenKind::Semi)?;
                    StmtKind::Call {
                        target: None,
                        callee,
                        args,
                    }
                } else {
                    let id = self.ident()?;
                    let target = if self.eat(&TokenKind::LBracket) {
                        let idx = self.expr()?;
                        self.expect(TokenKind::RBracket)?;
                        LValue::Index(id, idx)
                    } else {
                        LValue::Var(id)
                    };
                    self.expect(TokenKind::Assign)?;
                    let value = self.expr()?;
                    self.expect(TokenKind::Semi)?;
                    match value.kind {
                        ExprKind::Call(callee, args) => StmtKind::Call {
                            target: Some(target),
                            callee,
                            args,
                        },
                        _ => StmtKind::Assign { target, value },
                    }
                }
            }
            _ => {
                self.error_here("statement");
                return Err(());
            }
        };
        Ok(Stmt {
            kind,
            span: start.to(self.prev_span()),
        })
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let start = self.expect(TokenKind::If)?;
        self.expect(TokenKind::LParen)?;
        let cond = self.expr()?;
        self.expect(TokenKind::RParen)?;
        let then_branch = self.block()?;
        let else_branch = if self.eat(&TokenKind::Else) {
            if self.at(&TokenKind::If) {
                let nested = self.if_stmt()?;
                let span = nested.span;
                Some(Block {
                    stmts: vec![nested],
                    span,
                })
            } else {
                Some(self.block()?)
            }
        } else {
            None
        };
        Ok(Stmt {
            kind: StmtKind::If {
                cond,
                then_branch,
                else_branch,
            },
            span: start.to(self.prev_span()),
        })
    }

    fn call_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        Ok(args)
    }

    // ---- expressions -----------------------------------------------------

    fn expr(&mut self) -> PResult<Expr> {
        self.implies()
    }

    fn implies(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        if self.eat(&TokenKind::Implies) {
            let rhs = self.implies()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Expr::new(
                ExprKind::Binary(BinaryOp::Implies, Box::new(lhs), Box::new(rhs)),
                span,
            ));
        }
        Ok(lhs)
    }

    fn left_assoc(
        &mut self,
        next: fn(&mut Self) -> PResult<Expr>,
        op_of: fn(&TokenKind) -> Option<BinaryOp>,
    ) -> PResult<Expr> {
        let mut lhs = next(self)?;
        while let Some(op) = op_of(self.peek()) {
            self.bump();
            let rhs = next(self)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::and, |k| (k == &TokenKind::OrOr).then_some(BinaryOp::Or))
    }

    fn and(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::equality, |k| (k == &TokenKind::AndAnd).then_some(BinaryOp::And))
    }

    fn equality(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::relational, |k| match k {
            TokenKind::EqEq => Some(BinaryOp::Eq),
            TokenKind::NotEq => Some(BinaryOp::Ne),
            _ => None,
        })
    }

    fn relational(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::additive, |k| match k {
            TokenKind::Lt => Some(BinaryOp::Lt),
            TokenKind::Le => Some(BinaryOp::Le),
            TokenKind::Gt => Some(BinaryOp::Gt),
            TokenKind::Ge => Some(BinaryOp::Ge),
            _ => None,
        })
    }

    fn additive(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::multiplicative, |k| match k {
            TokenKind::Plus => Some(BinaryOp::Add),
            TokenKind::Minus => Some(BinaryOp::Sub),
            _ => None,
        })
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::unary, |k| match k {
            TokenKind::Star => Some(BinaryOp::Mul),
            TokenKind::Slash => Some(BinaryOp::Div),
            TokenKind::Percent => Some(BinaryOp::Mod),
            _ => None,
        })
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            TokenKind::Minus => UnaryOp::Neg,
            TokenKind::Bang => UnaryOp::Not,
            _ => return self.postfix(),
        };
        let start = self.bump().span;
        let operand = self.unary()?;
        let span = start.to(operand.span);
        Ok(Expr::new(ExprKind::Unary(op, Box::new(operand)), span))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat(&TokenKind::LBracket) {
                let idx = self.expr()?;
                let end = self.expect(TokenKind::RBracket)?;
                let span = e.span.to(end);
                e = Expr::new(ExprKind::Index(Box::new(e), Box::new(idx)), span);
            } else if self.at(&TokenKind::Dot) {
                self.bump();
                match self.peek() {
                    TokenKind::Ident(name) if name == "length" => {
                        let end = self.bump().span;
                        let span = e.span.to(end);
                        e = Expr::new(ExprKind::Length(Box::new(e)), span);
                    }
                    _ => {
                        self.error_here("`length`");
                        return Err(());
                    }
                }
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            TokenKind::Int(v) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(v), start))
            }
            TokenKind::True => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(true), start))
            }
            TokenKind::False => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(false), start))
            }
            TokenKind::Null => {
                self.bump();
                Ok(Expr::new(ExprKind::Null, start))
            }
            TokenKind::BsResult => {
                self.bump();
                Ok(Expr::new(ExprKind::Result, start))
            }
            TokenKind::Old | TokenKind::BsOld => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let inner = self.expr()?;
                let end = self.expect(TokenKind::RParen)?;
                Ok(Expr::new(ExprKind::Old(Box::new(inner)), start.to(end)))
            }
            TokenKind::Ident(_) => {
                let id = self.ident()?;
                if self.at(&TokenKind::LParen) {
                    let args = self.call_args()?;
                    let span = start.to(self.prev_span());
                    Ok(Expr::new(ExprKind::Call(id, args), span))
                } else {
                    Ok(Expr::new(ExprKind::Var(id.name), id.span))
                }
            }
            TokenKind::LParen => {
                self.bump();
                if matches!(self.peek(), TokenKind::BsForall | TokenKind::BsExists) {
                    return self.quantifier(start);
                }
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            _ => {
                self.error_here("expression");
                Err(())
            }
        }
    }

    fn quantifier(&mut self, start: Span) -> PResult<Expr> {
        let q = if self.bump().kind == TokenKind::BsForall {
            Quantifier::Forall
        } else {
            Quantifier::Exists
        };
        self.expect(TokenKind::IntTy)?;
        let var = self.ident()?;
        if self.at(&TokenKind::Comma) {
            let span = self.span();
            self.errors.push(Diagnostic::error(
                codes::PARSE_MULTIPLE_BINDERS,
                span,
                "quantifiers bind exactly one variable",
            ));
            return Err(());
        }
        self.expect(TokenKind::Semi)?;
        let first = self.expr()?;
        let body = if self.eat(&TokenKind::Semi) {
            let second = self.expr()?;
            let span = first.span.to(second.span);
            let op = match q {
                Quantifier::Forall => BinaryOp::Implies,
                Quantifier::Exists => BinaryOp::And,
            };
            Expr::new(ExprKind::Binary(op, Box::new(first), Box::new(second)), span)
        } else {
            first
        };
        let end = self.expect(TokenKind::RParen)?;
        Ok(Expr::new(ExprKind::Quant(q, var, Box::new(body)), start.to(end)))
    }
}

/// Parse a token stream (as produced by `tokenize`) into a program.
/// All syntax errors are reported, not only the first.
pub fn parse_program(tokens: &[Token]) -> Result<Program, Vec<Diagnostic>> {
    assert!(
        tokens.last().is_some_and(|t| t.kind == TokenKind::Eof),
        "token stream must end with Eof"
    );
    let mut p = Parser {
        tokens,
        pos: 0,
        errors: Vec::new(),
    };
    let program = p.program();
    if p.errors.is_empty() {
        Ok(program)
    } else {
        Err(p.errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::lexer::tokenize;
    use crate::source::SourceUnit;

    fn parse(src: &str) -> Result<Program, Vec<Diagnostic>> {
        let unit = SourceUnit::new("t", src);
        parse_program(&tokenize(&unit).unwrap())
    }

    #[test]
    fn minimal_method() {
        let p = parse("method m() {}").unwrap();
        assert_eq!(p.methods.len(), 1);
        assert!(p.methods[0].specs.is_empty());
        assert!(p.methods[0].body.as_ref().unwrap().stmts.is_empty());
    }

    #[test]
    fn implication_is_right_associative() {
        let p = parse("//@ requires a ==> b ==> c;\nmethod m(a: bool, b: bool, c: bool) {}").unwrap();
        let req = p.methods[0].requires().next().unwrap();
        match &req.kind {
            ExprKind::Binary(BinaryOp::Implies, lhs, rhs) => {
                assert_eq!(lhs.kind, ExprKind::Var("a".into()));
                assert!(matches!(rhs.kind, ExprKind::Binary(BinaryOp::Implies, _, _)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_semicolon_recovers_at_next_clause() {
        let err =
            parse("//@ requires x > 0\n//@ ensures \\result > 0;\nmethod m(x: int): int { return x; }").unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].code, codes::PARSE_UNEXPECTED);
        assert_eq!(err[0].span.line, 2);
    }

    #[test]
    fn reports_several_errors() {
        let err = parse("method m() { x := ; y := 1 + ; }").unwrap_err();
        assert_eq!(err.len(), 2);
    }

    #[test]
    fn precedence() {
        let p = parse("//@ requires a || b && c == d + e * f;\nmethod m() {}").unwrap();
        let req = p.methods[0].requires().next().unwrap();
        let ExprKind::Binary(BinaryOp::Or, _, rhs) = &req.kind else {
            panic!()
        };
        let ExprKind::Binary(BinaryOp::And, _, rhs) = &rhs.kind else {
            panic!()
        };
        let ExprKind::Binary(BinaryOp::Eq, _, rhs) = &rhs.kind else {
            panic!()
        };
        let ExprKind::Binary(BinaryOp::Add, _, rhs) = &rhs.kind else {
            panic!()
        };
        assert!(matches!(rhs.kind, ExprKind::Binary(BinaryOp::Mul, _, _)));
    }

    #[test]
    fn duplicate_assignable_rejected() {
        let err = parse("var g: int;\n//@ assignable g;\n//@ assignable \\nothing;\nmethod m() {}").unwrap_err();
        assert_eq!(err[0].code, codes::PARSE_DUPLICATE_ASSIGNABLE);
    }

    #[test]
    fn multiple_binders_rejected() {
        let err = parse("//@ requires (\\forall int i, j; i == j);\nmethod m() {}").unwrap_err();
        assert_eq!(err[0].code, codes::PARSE_MULTIPLE_BINDERS);
    }

    #[test]
    fn loop_specs_before_or_after_header() {
        let p = parse(
            "method m(n: int) { var i: int := 0;\n //@ invariant i <= n;\n while (i < n) //@ decreases n - i;\n { i := i + 1; } }",
        )
        .unwrap();
        let body = p.methods[0].body.as_ref().unwrap();
        let StmtKind::While {
            invariants, decreases, ..
        } = &body.stmts[1].kind
        else {
            panic!()
        };
        assert_eq!(invariants.len(), 1);
        assert!(decreases.is_some());
    }

    #[test]
    fn call_assignment_becomes_call_statement() {
        let p = parse("method m() { x := f(1, 2); f(); }").unwrap();
        let stmts = &p.methods[0].body.as_ref().unwrap().stmts;
        assert!(matches!(&stmts[0].kind, StmtKind::Call { target: Some(_), args, .. } if args.len() == 2));
        assert!(matches!(&stmts[1].kind, StmtKind::Call { target: None, .. }));
    }

    #[test]
    fn stray_tokens_do_not_hang() {
        assert!(parse("} } method ) ( ; ;").is_err());
        assert!(parse("method m() { method }").is_err());
    }
}

//! Two-level lexer: ordinary code tokens plus specification tokens re-lexed
//! from `//@ ...` and `/*@ ... @*/` comments.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::diag::{codes, Diagnostic};
use crate::source::{SourceUnit, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(BigInt),

    // code keywords
    Method,
    Var,
    If,
    Else,
    While,
    Return,
    True,
    False,
    IntTy,
    BoolTy,
    Nullable,
    Null,

    // specification keywords (only inside spec comments)
    Requires,
    Ensures,
    Assignable,
    Pure,
    Invariant,
    Decreases,
    Assert,
    Assume,
    Old,

    // backslash keywords
    BsResult,
    BsForall,
    BsExists,
    BsEverything,
    BsNothing,
    BsOld,

    Assign,
    Colon,
    Semi,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Dot,
    DotDot,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    NotEq,
    Bang,
    AndAnd,
    OrOr,
    Implies,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        let s = match self {
            Ident(name) => return write!(f, "identifier `{name}`"),
            Int(v) => return write!(f, "integer `{v}`"),
            Method => "`method`",
            Var => "`var`",
            If => "`if`",
            Else => "`else`",
            While => "`while`",
            Return => "`return`",
            True => "`true`",
            False => "`false`",
            IntTy => "`int`",
            BoolTy => "`bool`",
            Nullable => "`nullable`",
            Null => "`null`",
            Requires => "`requires`",
            Ensures => "`ensures`",
            Assignable => "`assignable`",
            Pure => "`pure`",
            Invariant => "`invariant`",
            Decreases => "`decreases`",
            Assert => "`assert`",
            Assume => "`assume`",
            Old => "`old`",
            BsResult => "`\\result`",
            BsForall => "`\\forall`",
            BsExists => "`\\exists`",
            BsEverything => "`\\everything`",
            BsNothing => "`\\nothing`",
            BsOld => "`\\old`",
            Assign => "`:=`",
            Colon => "`:`",
            Semi => "`;`",
            Comma => "`,`",
            LParen => "`(`",
            RParen => "`)`",
            LBrace => "`{`",
            RBrace => "`}`",
            LBracket => "`[`",
            RBracket => "`]`",
            Dot => "`.`",
            DotDot => "`..`",
            Plus => "`+`",
            Minus => "`-`",
            Star => "`*`",
            Slash => "`/`",
            Percent => "`%`",
            Lt => "`<`",
            Le => "`<=`",
            Gt => "`>`",
            Ge => "`>=`",
            EqEq => "`==`",
            NotEq => "`!=`",
            Bang => "`!`",
            AndAnd => "`&&`",
            OrOr => "`||`",
            Implies => "`==>`",
            Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
    /// True when the token came from a specification comment.
    pub spec: bool,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{span}: {message}")]
pub struct LexError {
    pub code: &'static str,
    pub span: Span,
    pub message: String,
}

impl From<LexError> for Diagnostic {
    fn from(e: LexError) -> Self {
        Diagnostic::error(e.code, e.span, e.message)
    }
}

fn code_keyword(word: &str) -> Option<TokenKind> {
    use TokenKind::*;
    Some(match word {
        "method" => Method,
        "var" => Var,
        "if" => If,
        "else" => Else,
        "while" => While,
        "return" => Return,
        "true" => True,
        "false" => False,
        "int" => IntTy,
        "bool" => BoolTy,
        "nullable" => Nullable,
        "null" => Null,
        _ => return None,
    })
}

fn spec_keyword(word: &str) -> Option<TokenKind> {
    use TokenKind::*;
    Some(match word {
        "requires" => Requires,
        "ensures" => Ensures,
        "assignable" => Assignable,
        "pure" => Pure,
        "invariant" => Invariant,
        "decreases" => Decreases,
        "assert" => Assert,
        "assume" => Assume,
        "old" => Old,
        _ => return None,
    })
}

fn backslash_keyword(word: &str) -> Option<TokenKind> {
    use TokenKind::*;
    Some(match word {
        "result" => BsResult,
        "forall" => BsForall,
        "exists" => BsExists,
        "everything" => BsEverything,
        "nothing" => BsNothing,
        "old" => BsOld,
        _ => return None,
    })
}

struct Lexer<'a> {
    unit: &'a SourceUnit,
    bytes: &'a [u8],
    pos: usize,
    /// End of the current spec region (exclusive) while re-lexing a spec comment.
    spec_end: Option<usize>,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn error(&self, code: &'static str, start: usize, end: usize, message: String) -> LexError {
        LexError {
            code,
            span: self.unit.span(start, end),
            message,
        }
    }

    fn limit(&self) -> usize {
        self.spec_end.unwrap_or(self.bytes.len())
    }

    fn peek(&self, ahead: usize) -> Option<u8> {
        let i = self.pos + ahead;
        if i < self.limit() {
            Some(self.bytes[i])
        } else {
            None
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        let span = self.unit.span(start, self.pos);
        self.tokens.push(Token {
            kind,
            span,
            spec: self.spec_end.is_some(),
        });
    }

    fn run(&mut self) -> Result<(), LexError> {
        while self.pos < self.limit() {
            let c = self.bytes[self.pos];
            let start = self.pos;
            if c.is_ascii_whitespace() || (self.spec_end.is_some() && c == b'@') {
                self.pos += 1;
                continue;
            }
            if c == b'/' && self.peek(1) == Some(b'/') {
                self.line_comment()?;
                continue;
            }
            if c == b'/' && self.peek(1) == Some(b'*') {
                self.block_comment()?;
                continue;
            }
            if c.is_ascii_alphabetic() || c == b'_' {
                while self.peek(0).is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_') {
                    self.pos += 1;
                }
                let word = &self.unit.text[start..self.pos];
                let kind = code_keyword(word)
                    .or_else(|| self.spec_end.and_then(|_| spec_keyword(word)))
                    .unwrap_or_else(|| TokenKind::Ident(word.to_string()));
                self.push(kind, start);
                continue;
            }
            if c.is_ascii_digit() {
                while self.peek(0).is_some_and(|b| b.is_ascii_digit() || b == b'_') {
                    self.pos += 1;
                }
                let digits: String = self.unit.text[start..self.pos]
                    .chars()
                    .filter(|ch| *ch != '_')
                    .collect();
                let value: BigInt = digits
                    .parse()
                    .map_err(|_| self.error(codes::LEX_BAD_INT, start, self.pos, "malformed integer".into()))?;
                self.push(TokenKind::Int(value), start);
                continue;
            }
            if c == b'\\' {
                self.pos += 1;
                while self.peek(0).is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_') {
                    self.pos += 1;
                }
                let word = &self.unit.text[start + 1..self.pos];
                match backslash_keyword(word) {
                    Some(kind) => self.push(kind, start),
                    None => {
                        return Err(self.error(
                            codes::LEX_ILLEGAL_CHAR,
                            start,
                            self.pos,
                            format!("unknown keyword `\\{word}`"),
                        ))
                    }
                }
                continue;
            }
            self.punct(start)?;
        }
        Ok(())
    }

    fn punct(&mut self, start: usize) -> Result<(), LexError> {
        use TokenKind::*;
        let c = self.bytes[self.pos];
        let two = |s: &Self, b: u8| s.peek(1) == Some(b);
        let (kind, width) = match c {
            b':' if two(self, b'=') => (Assign, 2),
            b':' => (Colon, 1),
            b';' => (Semi, 1),
            b',' => (Comma, 1),
            b'(' => (LParen, 1),
            b')' => (RParen, 1),
            b'{' => (LBrace, 1),
            b'}' => (RBrace, 1),
            b'[' => (LBracket, 1),
            b']' => (RBracket, 1),
            b'.' if two(self, b'.') => (DotDot, 2),
            b'.' => (Dot, 1),
            b'+' => (Plus, 1),
            b'-' => (Minus, 1),
            b'*' => (Star, 1),
            b'/' => (Slash, 1),
            b'%' => (Percent, 1),
            b'<' if two(self, b'=') => (Le, 2),
            b'<' => (Lt, 1),
            b'>' if two(self, b'=') => (Ge, 2),
            b'>' => (Gt, 1),
            b'=' if two(self, b'=') && self.peek(2) == Some(b'>') => (Implies, 3),
            b'=' if two(self, b'=') => (EqEq, 2),
            b'!' if two(self, b'=') => (NotEq, 2),
            b'!' => (Bang, 1),
            b'&' if two(self, b'&') => (AndAnd, 2),
            b'|' if two(self, b'|') => (OrOr, 2),
            _ => {
                let ch = self.unit.text[start..].chars().next().unwrap_or('?');
                return Err(self.error(
                    codes::LEX_ILLEGAL_CHAR,
                    start,
                    start + ch.len_utf8(),
                    format!("illegal character `{ch}`"),
                ));
            }
        };
        self.pos += width;
        self.push(kind, start);
        Ok(())
    }

    fn line_comment(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        let mut end = start;
        while end < self.limit() && self.bytes[end] != b'\n' {
            end += 1;
        }
        let is_spec = self.bytes.get(start + 2) == Some(&b'@') && self.spec_end.is_none();
        if is_spec {
            self.pos = start + 3;
            self.spec_end = Some(end);
            let res = self.run();
            self.spec_end = None;
            res?;
        }
        self.pos = end;
        Ok(())
    }

    fn block_comment(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        let limit = self.limit();
        let mut end = start + 2;
        let close = loop {
            if end + 1 >= limit {
                return Err(self.error(
                    codes::LEX_UNTERMINATED_COMMENT,
                    start,
                    start + 2,
                    "unterminated comment".into(),
                ));
            }
            if self.bytes[end] == b'*' && self.bytes[end + 1] == b'/' {
                break end;
            }
            end += 1;
        };
        let is_spec = self.bytes.get(start + 2) == Some(&b'@') && self.spec_end.is_none();
        if is_spec {
            self.pos = start + 3;
            self.spec_end = Some(close);
            let res = self.run();
            self.spec_end = None;
            res?;
        }
        self.pos = close + 2;
        Ok(())
    }
}

/// Tokenize a source unit. The final token is always `Eof`.
pub fn tokenize(unit: &SourceUnit) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer {
        unit,
        bytes: unit.text.as_bytes(),
        pos: 0,
        spec_end: None,
        tokens: Vec::new(),
    };
    lexer.run()?;
    let end = unit.text.len();
    let span = unit.span(end, end);
    lexer.tokens.push(Token {
        kind: TokenKind::Eof,
        span,
        spec: false,
    });
    Ok(lexer.tokens)
}

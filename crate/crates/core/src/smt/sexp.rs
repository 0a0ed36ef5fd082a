//! Minimal S-expression reader for solver replies.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed solver reply: {0}")]
pub struct ProtocolError(pub String);

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(l) => Some(l),
            Sexp::Atom(_) => None,
        }
    }

    /// `(error "...")` replies.
    pub fn is_error(&self) -> bool {
        matches!(self.as_list(), Some([Sexp::Atom(head), ..]) if head == "error")
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, s) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Nesting depth after scanning `text`, or `None` if a closing parenthesis
/// has no partner. Strings, quoted symbols and comments are skipped.
fn depth(text: &str) -> Option<(i64, bool)> {
    let mut depth = 0i64;
    let mut seen = false;
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        match c {
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '"' => {
                seen = true;
                for c in chars.by_ref() {
                    if c == '"' {
                        break;
                    }
                }
            }
            '|' => {
                seen = true;
                for c in chars.by_ref() {
                    if c == '|' {
                        break;
                    }
                }
            }
            '(' => {
                depth += 1;
                seen = true;
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            c if !c.is_whitespace() => seen = true,
            _ => {}
        }
    }
    Some((depth, seen))
}

/// True when `text` holds at least one complete expression and no open list.
pub fn is_complete(text: &str) -> bool {
    matches!(depth(text), Some((0, true)))
}

pub fn parse_all(text: &str) -> Result<Vec<Sexp>, ProtocolError> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' => {
                chars.next();
                stack.push(Vec::new());
            }
            ')' => {
                chars.next();
                let done = stack
                    .pop()
                    .filter(|_| !stack.is_empty())
                    .ok_or_else(|| ProtocolError(text.into()))?;
                stack.last_mut().expect("non-empty").push(Sexp::List(done));
            }
            '"' | '|' => {
                let close = c;
                let mut s = String::new();
                s.push(chars.next().expect("peeked"));
                let mut closed = false;
                for c in chars.by_ref() {
                    s.push(c);
                    if c == close {
                        closed = true;
                        break;
                    }
                }
                if !closed {
                    return Err(ProtocolError(text.into()));
                }
                stack.last_mut().expect("non-empty").push(Sexp::Atom(s));
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                stack.last_mut().expect("non-empty").push(Sexp::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err(ProtocolError(text.into()));
    }
    Ok(stack.pop().expect("root"))
}

pub fn parse_one(text: &str) -> Result<Sexp, ProtocolError> {
    let mut all = parse_all(text)?;
    if all.len() != 1 {
        return Err(ProtocolError(text.into()));
    }
    Ok(all.pop().expect("one"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_get_value_reply() {
        let s = parse_one("((x 4)\n ((- 5) (- 5)))").unwrap();
        assert_eq!(s.to_string(), "((x 4) ((- 5) (- 5)))");
    }

    #[test]
    fn completeness() {
        assert!(is_complete("sat\n"));
        assert!(!is_complete("((x 4)\n"));
        assert!(is_complete("((x 4)\n (y 5))"));
        assert!(!is_complete("   "));
        assert!(is_complete("(error \"a ) b\")"));
    }

    #[test]
    fn rejects_unbalanced() {
        assert!(parse_all("(a b").is_err());
        assert!(parse_all("a)").is_err());
    }
}

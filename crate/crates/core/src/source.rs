//! Source files and locations.

use std::fmt;
use std::path::Path;

use serde::Serialize;

/// A region of source text. `line`/`col` are 1-based; `len` counts characters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub offset: usize,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl Span {
    pub fn new(offset: usize, line: u32, col: u32, len: u32) -> Self {
        Span { offset, line, col, len }
    }

    /// Smallest span covering both `self` and `other` (assumes `self` starts first).
    pub fn to(self, other: Span) -> Span {
        let end = (other.offset + other.len as usize).max(self.offset + self.len as usize);
        Span {
            offset: self.offset,
            line: self.line,
            col: self.col,
            len: (end - self.offset) as u32,
        }
    }

    pub fn end(&self) -> usize {
        self.offset + self.len as usize
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// One MiniJML compilation unit.
#[derive(Debug, Clone)]
pub struct SourceUnit {
    pub path: String,
    pub text: String,
    /// Byte offsets of line starts; `line_index[0] == 0`.
    pub line_index: Vec<usize>,
}

impl SourceUnit {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut line_index = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_index.push(i + 1);
            }
        }
        SourceUnit {
            path: path.into(),
            text,
            line_index,
        }
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(SourceUnit::new(path.display().to_string(), text))
    }

    /// 1-based (line, column) of a byte offset; columns count characters.
    pub fn position(&self, offset: usize) -> (u32, u32) {
        let offset = offset.min(self.text.len());
        let line = match self.line_index.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_index[line];
        let col = self.text[start..offset].chars().count();
        (line as u32 + 1, col as u32 + 1)
    }

    pub fn span(&self, start: usize, end: usize) -> Span {
        let (line, col) = self.position(start);
        let len = self.text[start..end.min(self.text.len())].chars().count();
        Span::new(start, line, col, len as u32)
    }

    /// Text of a 1-based line without its terminator.
    pub fn line_text(&self, line: u32) -> &str {
        let idx = line as usize;
        if idx == 0 || idx > self.line_index.len() {
            return "";
        }
        let start = self.line_index[idx - 1];
        let end = self.line_index.get(idx).copied().unwrap_or(self.text.len());
        self.text[start..end].trim_end_matches(['\n', '\r'])
    }

    pub fn line_count(&self) -> usize {
        self.line_index.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_index_is_strictly_increasing() {
        let unit = SourceUnit::new("t.mjml", "a\nbc\n\nd");
        assert_eq!(unit.line_index, vec![0, 2, 5, 6]);
        assert!(unit.line_index.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn positions_are_one_based() {
        let unit = SourceUnit::new("t.mjml", "ab\ncd");
        assert_eq!(unit.position(0), (1, 1));
        assert_eq!(unit.position(1), (1, 2));
        assert_eq!(unit.position(3), (2, 1));
        assert_eq!(unit.position(5), (2, 3));
        assert_eq!(unit.line_text(2), "cd");
        assert_eq!(unit.line_text(9), "");
    }
}

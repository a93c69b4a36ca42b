//! Source locations attached to tokens, elements and diagnostics.

use std::fmt;

/// A region of a source file, 1-based and inclusive on both ends.
///
/// The start position never follows the end position (lexicographically on
/// `(line, col)`); `SourceSpan::new` normalizes swapped endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: String,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(
        file: impl Into<String>,
        start_line: u32,
        start_col: u32,
        end_line: u32,
        end_col: u32,
    ) -> Self {
        let (mut sl, mut sc, mut el, mut ec) = (
            start_line.max(1),
            start_col.max(1),
            end_line.max(1),
            end_col.max(1),
        );
        if (el, ec) < (sl, sc) {
            std::mem::swap(&mut sl, &mut el);
            std::mem::swap(&mut sc, &mut ec);
        }
        SourceSpan {
            file: file.into(),
            start_line: sl,
            start_col: sc,
            end_line: el,
            end_col: ec,
        }
    }

    /// A one-position span.
    pub fn point(file: impl Into<String>, line: u32, col: u32) -> Self {
        Self::new(file, line, col, line, col)
    }

    /// The smallest span covering both `self` and `other`.
    pub fn merge(&self, other: &SourceSpan) -> SourceSpan {
        let start = [
            (self.start_line, self.start_col),
            (other.start_line, other.start_col),
        ]
        .into_iter()
        .min()
        .unwrap();
        let end = [(self.end_line, self.end_col), (other.end_line, other.end_col)]
            .into_iter()
            .max()
            .unwrap();
        SourceSpan {
            file: self.file.clone(),
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_never_follows_end() {
        let s = SourceSpan::new("f", 3, 7, 1, 2);
        assert_eq!((s.start_line, s.start_col), (1, 2));
        assert_eq!((s.end_line, s.end_col), (3, 7));
    }

    #[test]
    fn merge_covers_both() {
        let a = SourceSpan::new("f", 1, 5, 1, 9);
        let b = SourceSpan::new("f", 2, 1, 2, 4);
        let m = a.merge(&b);
        assert_eq!((m.start_line, m.start_col), (1, 5));
        assert_eq!((m.end_line, m.end_col), (2, 4));
    }
}

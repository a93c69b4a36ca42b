//! Hand-written lexer for `.rsl` source text.
//!
//! Tokens carry their verbatim source text, so concatenating token texts
//! with the original whitespace reproduces the input. String literals keep
//! their quotes and escapes in `text`; use [`Token::string_value`] for the
//! decoded value. Raw newlines are allowed inside string literals.

use crate::diag::{Code, Diagnostic};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    StringLiteral,
    IntLiteral,
    Punct,
    Comment,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: SourceSpan,
}

impl Token {
    /// Decodes a string literal: strips the quotes and resolves the `\"`
    /// and `\\` escapes.
    pub fn string_value(&self) -> String {
        debug_assert_eq!(self.kind, TokenKind::StringLiteral);
        let inner = &self.text[1..self.text.len() - 1];
        let mut out = String::with_capacity(inner.len());
        let mut chars = inner.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                match chars.next() {
                    Some(escaped) => out.push(escaped),
                    None => out.push('\\'),
                }
            } else {
                out.push(c);
            }
        }
        out
    }
}

/// Structural words of the grammar. Vocabulary literals (`User`, `Master`,
/// `Main`, ...) are ordinary identifiers checked against their vocabulary
/// by the parser.
pub const KEYWORDS: &[&str] = &[
    "Package", "Import", "as", "Actor", "DataEntity", "attribute", "constraints", "references",
    "UseCase", "actorInitiates", "dataEntity", "scenario", "step", "UserStory", "asA", "iWant",
    "soThat", "priority", "Goal", "partOf", "QR", "metric", "value", "TestCase", "traces",
    "given", "when", "then", "Term", "definition", "synonym", "notPreferred", "description",
];

const PUNCT: &[char] = &['{', '}', '[', ']', '(', ')', ':', ',', '.'];

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    file: &'a str,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(source: &'a str, file: &'a str) -> Self {
        Lexer { chars: source.chars().peekable(), file, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: (u32, u32), end: (u32, u32)) -> SourceSpan {
        SourceSpan::new(self.file, start.0, start.1, end.0, end.1)
    }
}

/// Lexes the whole input. The result always ends with an `Eof` token.
/// Fails on the first unterminated string (`RSL-P001`) or illegal
/// character (`RSL-P002`).
pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer::new(source, file);
    let mut tokens = Vec::new();

    while let Some(&c) = lx.chars.peek() {
        let start = (lx.line, lx.col);

        if c.is_whitespace() {
            lx.bump();
            continue;
        }

        if c == '/' {
            let mut text = String::new();
            text.push(lx.bump().unwrap());
            if lx.chars.peek() == Some(&'/') {
                while let Some(&n) = lx.chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    text.push(lx.bump().unwrap());
                }
                let end = (lx.line, lx.col.saturating_sub(1).max(1));
                tokens.push(Token {
                    kind: TokenKind::Comment,
                    text,
                    span: lx.span_from(start, end),
                });
                continue;
            }
            return Err(Diagnostic::new(
                Code::P002,
                Some(SourceSpan::point(file, start.0, start.1)),
                "illegal character '/' (expected '//' comment)",
            ));
        }

        if c == '"' {
            let mut text = String::new();
            text.push(lx.bump().unwrap());
            let mut terminated = false;
            while let Some(&n) = lx.chars.peek() {
                if n == '"' {
                    text.push(lx.bump().unwrap());
                    terminated = true;
                    break;
                }
                if n == '\\' {
                    text.push(lx.bump().unwrap());
                    if let Some(escaped) = lx.bump() {
                        text.push(escaped);
                    }
                    continue;
                }
                text.push(lx.bump().unwrap());
            }
            if !terminated {
                return Err(Diagnostic::new(
                    Code::P001,
                    Some(SourceSpan::point(file, start.0, start.1)),
                    "unterminated string literal",
                ));
            }
            let end = (lx.line, lx.col.saturating_sub(1).max(1));
            tokens.push(Token {
                kind: TokenKind::StringLiteral,
                text,
                span: lx.span_from(start, end),
            });
            continue;
        }

        if c.is_ascii_digit() {
            let mut text = String::new();
            while matches!(lx.chars.peek(), Some(d) if d.is_ascii_digit()) {
                text.push(lx.bump().unwrap());
            }
            let end = (lx.line, lx.col - 1);
            tokens.push(Token { kind: TokenKind::IntLiteral, text, span: lx.span_from(start, end) });
            continue;
        }

        if c.is_ascii_alphabetic() {
            let mut text = String::new();
            while matches!(lx.chars.peek(), Some(&i) if i.is_ascii_alphanumeric() || i == '_') {
                text.push(lx.bump().unwrap());
            }
            let end = (lx.line, lx.col - 1);
            let kind = if KEYWORDS.contains(&text.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            tokens.push(Token { kind, text, span: lx.span_from(start, end) });
            continue;
        }

        if PUNCT.contains(&c) {
            let mut text = String::new();
            text.push(lx.bump().unwrap());
            tokens.push(Token { kind: TokenKind::Punct, text, span: lx.span_from(start, start) });
            continue;
        }

        return Err(Diagnostic::new(
            Code::P002,
            Some(SourceSpan::point(file, start.0, start.1)),
            format!("illegal character {c:?}"),
        ));
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        text: String::new(),
        span: SourceSpan::point(file, lx.line, lx.col),
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src, "t").unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn keywords_identifiers_and_strings() {
        assert_eq!(
            kinds(r#"Actor a "A""#),
            vec![TokenKind::Keyword, TokenKind::Identifier, TokenKind::StringLiteral, TokenKind::Eof]
        );
    }

    #[test]
    fn unterminated_string_reports_p001_at_the_quote() {
        let err = tokenize("\"unclosed", "t").unwrap_err();
        assert_eq!(err.code, Code::P001);
        let span = err.span.unwrap();
        assert_eq!((span.start_line, span.start_col), (1, 1));
    }

    #[test]
    fn illegal_character_reports_p002() {
        let err = tokenize("Actor @", "t").unwrap_err();
        assert_eq!(err.code, Code::P002);
        assert_eq!(err.span.unwrap().start_col, 7);
    }

    #[test]
    fn comments_are_preserved() {
        let toks = tokenize("// note\nActor a : User", "t").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Comment);
        assert_eq!(toks[0].text, "// note");
    }

    #[test]
    fn escapes_decode() {
        let toks = tokenize(r#""say \"hi\" \\ done""#, "t").unwrap();
        assert_eq!(toks[0].string_value(), r#"say "hi" \ done"#);
    }

    #[test]
    fn crlf_input_is_accepted() {
        let toks = tokenize("Package p {\r\n}\r\n", "t").unwrap();
        assert_eq!(toks.len(), 5);
        assert_eq!(toks[3].span.start_line, 2);
    }

    #[test]
    fn token_texts_reproduce_input_without_whitespace() {
        let src = "Package p { Actor a \"X\" : User }";
        let toks = tokenize(src, "t").unwrap();
        let glued: String = toks.iter().map(|t| t.text.as_str()).collect();
        let stripped: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        assert_eq!(glued, stripped);
    }

    #[test]
    fn spans_stay_within_input_bounds() {
        let src = "Package p {\n    Actor a : User\n}\n";
        let line_count = src.lines().count() as u32;
        for t in tokenize(src, "t").unwrap() {
            assert!(t.span.start_line >= 1 && t.span.end_line <= line_count + 1);
        }
    }
}

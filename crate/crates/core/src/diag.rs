//! Diagnostics and the stable code registry.
//!
//! Every finding produced anywhere in the toolchain carries a code from the
//! registry below. Codes are grouped by family: `P` parse, `C` consistency,
//! `X` completeness, `A` ambiguity, `I` import, `T` transform, `L` library.
//! The rendered registry lives in `docs/diagnostics.md` and is kept in sync
//! by a test.

use std::fmt;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Info => write!(f, "info"),
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

macro_rules! codes {
    ($($variant:ident => $text:literal, $severity:ident, $meaning:literal;)*) => {
        /// A stable diagnostic code of the form `RSL-<family><nnn>`.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $($variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }

            /// The severity this code carries unless an operation overrides it
            /// (completeness findings escalate under `WarningsAsErrors`).
            pub fn default_severity(&self) -> Severity {
                match self {
                    $(Code::$variant => Severity::$severity,)*
                }
            }

            /// One-line meaning, as published in the registry table.
            pub fn meaning(&self) -> &'static str {
                match self {
                    $(Code::$variant => $meaning,)*
                }
            }
        }
    };
}

codes! {
    // Parse
    P001 => "RSL-P001", Error, "unterminated string literal";
    P002 => "RSL-P002", Error, "illegal character in input";
    P010 => "RSL-P010", Error, "unexpected token (message names the expected one)";
    P011 => "RSL-P011", Error, "unknown element keyword";
    P012 => "RSL-P012", Error, "literal is not a member of the attribute's vocabulary";
    P013 => "RSL-P013", Error, "property repeated within one element block";
    P014 => "RSL-P014", Error, "value violates a structural rule (empty text, bad identifier, non-positive order)";
    // Consistency
    C001 => "RSL-C001", Error, "duplicate element identifier";
    C010 => "RSL-C010", Error, "reference does not resolve to any element";
    C011 => "RSL-C011", Error, "reference resolves to an element of the wrong kind";
    C012 => "RSL-C012", Error, "step orders within a scenario are not strictly ascending";
    C013 => "RSL-C013", Error, "duplicate scenario identifier within a use case";
    C014 => "RSL-C014", Error, "goal partOf links form a cycle";
    C015 => "RSL-C015", Error, "use case declares more than one Main scenario";
    C016 => "RSL-C016", Error, "foreign key attribute has a datatype other than Integer or Text";
    C017 => "RSL-C017", Error, "duplicate attribute name within a data entity";
    C018 => "RSL-C018", Error, "data entity declares more than one PrimaryKey attribute";
    // Completeness
    X001 => "RSL-X001", Error, "malformed construct rule token in the check configuration";
    X010 => "RSL-X010", Warning, "required element kind has no instances (model level)";
    X011 => "RSL-X011", Warning, "viewpoint has no instances of any of its kinds";
    X012 => "RSL-X012", Warning, "element violates a construct rule";
    // Ambiguity
    A010 => "RSL-A010", Warning, "vague term used in a text field";
    A011 => "RSL-A011", Warning, "non-preferred synonym used where a preferred term exists";
    A012 => "RSL-A012", Warning, "two preferred glossary terms declare each other as synonyms";
    // Import resolution
    I010 => "RSL-I010", Error, "imported package not found on the search path";
    I011 => "RSL-I011", Error, "imported file failed to parse";
    I012 => "RSL-I012", Error, "import cycle";
    // Transformations
    T010 => "RSL-T010", Error, "unknown field in a JSON document";
    T011 => "RSL-T011", Error, "unsupported JSON schema version";
    T012 => "RSL-T012", Error, "malformed JSON document";
    T020 => "RSL-T020", Error, "workbook I/O failure";
    T021 => "RSL-T021", Error, "workbook row references a parent that does not exist";
    T022 => "RSL-T022", Error, "workbook file is missing a required column or file";
    T023 => "RSL-T023", Error, "workbook cell holds a literal outside its vocabulary";
    T024 => "RSL-T024", Warning, "unknown workbook file or column ignored";
    T025 => "RSL-T025", Error, "workbook cell value is malformed";
    T030 => "RSL-T030", Error, "template path does not name a known attribute or kind";
    T031 => "RSL-T031", Error, "style is unknown or does not apply to the current element";
    T032 => "RSL-T032", Error, "template tags are unbalanced";
    T033 => "RSL-T033", Error, "style definition is invalid";
    T040 => "RSL-T040", Error, "foreign key target entity has no PrimaryKey attribute";
    T041 => "RSL-T041", Error, "code generation precondition violated (model is inconsistent)";
    // Libraries
    L010 => "RSL-L010", Error, "qualified name collision between imported libraries";
    L011 => "RSL-L011", Error, "library manifest is corrupt or names the wrong package";
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single validation, parse or transformation finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    /// Absent for whole-model findings.
    pub span: Option<SourceSpan>,
    pub message: String,
    pub related: Vec<(SourceSpan, String)>,
}

impl Diagnostic {
    pub fn new(code: Code, span: Option<SourceSpan>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: code.default_severity(),
            code,
            span,
            message: message.into(),
            related: Vec::new(),
        }
    }

    pub fn error(code: Code, span: Option<SourceSpan>, message: impl Into<String>) -> Self {
        let mut d = Self::new(code, span, message);
        d.severity = Severity::Error;
        d
    }

    pub fn with_severity(mut self, severity: Severity) -> Self {
        self.severity = severity;
        self
    }

    pub fn with_related(mut self, span: SourceSpan, note: impl Into<String>) -> Self {
        self.related.push((span, note.into()));
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    /// The normative `file:line:col: severity[code]: message` line; findings
    /// without a span print as `severity[code]: message`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.span {
            Some(s) => write!(
                f,
                "{}:{}:{}: {}[{}]: {}",
                s.file, s.start_line, s.start_col, self.severity, self.code, self.message
            ),
            None => write!(f, "{}[{}]: {}", self.severity, self.code, self.message),
        }
    }
}

/// Renders the code registry as the markdown table published in
/// `docs/diagnostics.md`.
pub fn registry_table() -> String {
    let mut out = String::from(
        "# Diagnostic code registry\n\n\
         Every diagnostic the toolchain emits carries one of the codes below.\n\
         Codes are stable; tools may match on them. Severities are defaults:\n\
         completeness findings (`RSL-X01x`) escalate to errors under the\n\
         `WarningsAsErrors` strictness.\n\n\
         | Code | Severity | Meaning |\n|------|----------|---------|\n",
    );
    for code in Code::ALL {
        out.push_str(&format!(
            "| {} | {} | {} |\n",
            code.as_str(),
            code.default_severity(),
            code.meaning()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_match_documented_shape() {
        let re = regex::Regex::new(r"^RSL-[PCXAITL][0-9]{3}$").unwrap();
        for code in Code::ALL {
            assert!(re.is_match(code.as_str()), "bad code {}", code);
        }
    }

    #[test]
    fn codes_are_unique() {
        let mut seen = std::collections::HashSet::new();
        for code in Code::ALL {
            assert!(seen.insert(code.as_str()), "duplicate {}", code);
        }
    }

    #[test]
    fn display_format_is_normative() {
        let d = Diagnostic::new(
            Code::C010,
            Some(SourceSpan::new("a.rsl", 3, 5, 3, 9)),
            "unresolved reference 'a_Ghost'",
        );
        assert_eq!(
            d.to_string(),
            "a.rsl:3:5: error[RSL-C010]: unresolved reference 'a_Ghost'"
        );
    }
}

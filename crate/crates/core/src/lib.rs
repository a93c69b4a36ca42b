//! Toolchain for an RSL-style controlled natural language for requirements
//! and tests: parse and pretty-print `.rsl` files, validate models for
//! consistency, completeness and ambiguity, transform them between text,
//! JSON, CSV workbooks, rendered documents and SQL DDL, extract draft
//! models from free text, and compose reusable specification libraries.
//!
//! The crate is organized around [`model::SpecificationModel`]:
//!
//! * [`parse`] — lexer, recursive-descent parser and canonical formatter
//! * [`validate`] — the consistency / completeness / ambiguity checkers
//! * [`transform`] — JSON interchange, CSV workbooks, document templates,
//!   SQL generation
//! * [`extract`] — rule-based sentence classification and model extraction
//! * [`libs`] — import resolution, library merging and catalog listing
//! * [`modelgen`] — the seeded pseudo-random model generator backing the
//!   round-trip test corpus

pub mod diag;
pub mod extract;
pub mod libs;
pub mod model;
pub mod modelgen;
pub mod parse;
pub mod span;
pub mod transform;
pub mod validate;

pub use diag::{Code, Diagnostic, Severity};
pub use model::SpecificationModel;
pub use span::SourceSpan;

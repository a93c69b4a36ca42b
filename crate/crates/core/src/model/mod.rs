//! The in-memory metamodel: identifiers, the specification model and its
//! structural operations.
//!
//! Models are plain immutable values. Operations either return new values
//! (`add_element`, `canonicalized`) or read-only views (`resolve`), so a
//! model can be shared freely across threads.

mod config;
mod element;
mod pattern;

pub use config::{CheckConfig, Strictness};
pub use element::*;
pub use pattern::{pattern_for, pattern_for_kind, AttributeRule, LinguisticPattern, LinguisticStyle, Multiplicity, VocabularyRule};

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::diag::{Code, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("'{0}' is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("'{0}' is not a valid qualified name")]
    InvalidQualifiedName(String),
    #[error("'{term}' is not in the vocabulary {{{}}}", allowed.join(", "))]
    UnknownVocabularyTerm { term: String, allowed: Vec<&'static str> },
    #[error("{0} must not be empty")]
    EmptyText(&'static str),
    #[error("step order must be a positive integer")]
    NonPositiveOrder,
    #[error("synonym of '{0}' must not equal the term itself")]
    SynonymEqualsTerm(String),
    #[error("import alias '{0}' is already in use")]
    DuplicateAlias(String),
    #[error("style placeholder '{attribute}' is not an attribute of {kind}")]
    UnknownStyleAttribute { attribute: String, kind: String },
}

fn is_identifier_segment(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A local element identifier.
///
/// Declared identifiers are single segments (`[A-Za-z][A-Za-z0-9_]*`);
/// merging imported libraries produces qualified identifiers with
/// dot-separated segments (`u.qr_login_time`). Both forms are valid here
/// and compare case-sensitively.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(String);

impl Ident {
    pub fn new(s: impl Into<String>) -> Result<Self, ModelError> {
        let s = s.into();
        if !s.is_empty() && s.split('.').all(is_identifier_segment) {
            Ok(Ident(s))
        } else {
            Err(ModelError::InvalidIdentifier(s))
        }
    }

    /// Derives an identifier from free text: lowercase, every character
    /// that is not ASCII alphanumeric becomes `_`, with `prefix` in front.
    pub fn slug(prefix: &str, phrase: &str) -> Self {
        let mut out = String::from(prefix);
        for c in phrase.to_lowercase().chars() {
            out.push(if c.is_ascii_alphanumeric() { c } else { '_' });
        }
        debug_assert!(is_identifier_segment(&out), "slug prefix must start with a letter");
        Ident(out)
    }

    /// Prefixes this identifier with a namespace qualifier.
    pub fn qualified(qualifier: &str, id: &Ident) -> Self {
        Ident(format!("{qualifier}.{}", id.0))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Ident {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A dotted package name such as `org.acme.orders`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualifiedName(Vec<String>);

impl QualifiedName {
    pub fn parse(s: &str) -> Result<Self, ModelError> {
        let segments: Vec<String> = s.split('.').map(str::to_string).collect();
        if !s.is_empty() && segments.iter().all(|seg| is_identifier_segment(seg)) {
            Ok(QualifiedName(segments))
        } else {
            Err(ModelError::InvalidQualifiedName(s.to_string()))
        }
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn last_segment(&self) -> &str {
        self.0.last().expect("qualified names are non-empty")
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportDecl {
    pub target: QualifiedName,
    pub alias: Option<String>,
}

impl ImportDecl {
    pub fn new(target: QualifiedName, alias: Option<String>) -> Result<Self, ModelError> {
        if let Some(a) = &alias {
            if !is_identifier_segment(a) {
                return Err(ModelError::InvalidIdentifier(a.clone()));
            }
        }
        Ok(ImportDecl { target, alias })
    }

    /// The namespace qualifier this import contributes on merge.
    pub fn qualifier(&self) -> &str {
        self.alias.as_deref().unwrap_or_else(|| self.target.last_segment())
    }
}

/// A parsed `*SL` package: imports plus an ordered element list.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecificationModel {
    pub package_name: QualifiedName,
    pub imports: Vec<ImportDecl>,
    pub elements: Vec<Element>,
    pub source: Option<PathBuf>,
}

impl SpecificationModel {
    /// An empty model: zero elements, zero imports.
    pub fn new(package_name: QualifiedName) -> Self {
        SpecificationModel { package_name, imports: Vec::new(), elements: Vec::new(), source: None }
    }

    /// Appends an import; aliases must be unique within the model.
    pub fn add_import(&mut self, decl: ImportDecl) -> Result<(), ModelError> {
        if let Some(a) = &decl.alias {
            if self.imports.iter().any(|i| i.alias.as_deref() == Some(a)) {
                return Err(ModelError::DuplicateAlias(a.clone()));
            }
        }
        self.imports.push(decl);
        Ok(())
    }

    /// Returns a new model with `e` appended, or an `RSL-C001` diagnostic
    /// if the id collides; the receiver is never mutated.
    pub fn add_element(&self, e: Element) -> Result<SpecificationModel, Diagnostic> {
        let mut next = self.clone();
        next.push_element(e)?;
        Ok(next)
    }

    /// In-place variant of [`add_element`](Self::add_element) for builders.
    pub fn push_element(&mut self, e: Element) -> Result<(), Diagnostic> {
        if let Some(existing) = self.resolve(e.id.as_str()) {
            let mut d = Diagnostic::new(
                Code::C001,
                e.span.clone(),
                format!("duplicate identifier '{}'", e.id),
            );
            if let Some(span) = &existing.span {
                d = d.with_related(span.clone(), "first declared here".to_string());
            }
            return Err(d);
        }
        self.elements.push(e);
        Ok(())
    }

    /// Finds the element with the given local id (case-sensitive).
    pub fn resolve(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.id.as_str() == id)
    }

    pub fn elements_of(&self, kind: ElementKind) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(move |e| e.kind() == kind)
    }

    /// Renumbers scenario steps to a contiguous `1..n` (preserving their
    /// relative order) and re-applies attribute constraint normalization.
    /// Element and attribute order is untouched. Idempotent.
    pub fn canonicalized(&self) -> SpecificationModel {
        let mut next = self.clone();
        for e in &mut next.elements {
            match &mut e.body {
                ElementBody::UseCase(uc) => {
                    for scenario in &mut uc.scenarios {
                        for (i, step) in scenario.steps.iter_mut().enumerate() {
                            step.order = i as u32 + 1;
                        }
                    }
                }
                ElementBody::DataEntity(entity) => {
                    for attr in &mut entity.attributes {
                        attr.normalize();
                    }
                }
                _ => {}
            }
        }
        next
    }

    /// A copy with every source span and the source path removed.
    pub fn stripped(&self) -> SpecificationModel {
        let mut next = self.clone();
        next.source = None;
        for e in &mut next.elements {
            e.span = None;
            match &mut e.body {
                ElementBody::UseCase(uc) => {
                    for s in &mut uc.scenarios {
                        s.span = None;
                        for step in &mut s.steps {
                            step.span = None;
                        }
                    }
                }
                ElementBody::DataEntity(entity) => {
                    for a in &mut entity.attributes {
                        a.span = None;
                    }
                }
                _ => {}
            }
        }
        next
    }

    /// Field-by-field equality of the canonicalized models, ignoring
    /// source spans and paths.
    pub fn structural_eq(&self, other: &SpecificationModel) -> bool {
        self.canonicalized().stripped() == other.canonicalized().stripped()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(pkg: &str) -> SpecificationModel {
        SpecificationModel::new(QualifiedName::parse(pkg).unwrap())
    }

    fn actor(id: &str) -> Element {
        Element::new(Ident::new(id).unwrap(), ElementBody::Actor(Actor { kind: ActorKind::User }))
    }

    #[test]
    fn new_model_is_empty() {
        let m = model("p");
        assert!(m.elements.is_empty());
        assert!(m.imports.is_empty());
        assert_eq!(m.package_name.to_string(), "p");

        let m = model("org.acme.orders");
        assert_eq!(m.package_name.segments().len(), 3);
    }

    #[test]
    fn bad_package_name_is_rejected() {
        assert!(QualifiedName::parse("9bad").is_err());
        assert!(QualifiedName::parse("a..b").is_err());
        assert!(QualifiedName::parse("").is_err());
    }

    #[test]
    fn add_element_detects_duplicates_without_mutating() {
        let m = model("p").add_element(actor("a_User")).unwrap();
        assert_eq!(m.elements.len(), 1);
        let err = m.add_element(actor("a_User")).unwrap_err();
        assert_eq!(err.code, Code::C001);
        assert_eq!(m.elements.len(), 1);
    }

    #[test]
    fn dangling_references_are_not_a_construction_error() {
        let uc = Element::new(
            Ident::new("uc_1").unwrap(),
            ElementBody::UseCase(UseCase {
                kind: UseCaseKind::Other,
                primary_actor: Some(Ident::new("a_Missing").unwrap()),
                data_entities: vec![],
                scenarios: vec![],
            }),
        );
        let m = model("p").add_element(actor("a_User")).unwrap();
        assert!(m.add_element(uc).is_ok());
    }

    #[test]
    fn resolve_is_case_sensitive() {
        let m = model("p").add_element(actor("a_User")).unwrap();
        assert!(m.resolve("a_User").is_some());
        assert!(m.resolve("a_user").is_none());
    }

    #[test]
    fn canonicalize_renumbers_steps() {
        let steps = vec![
            Step::new(2, Performer::Actor, "first").unwrap(),
            Step::new(5, Performer::System, "second").unwrap(),
            Step::new(9, Performer::Actor, "third").unwrap(),
        ];
        let uc = Element::new(
            Ident::new("uc_1").unwrap(),
            ElementBody::UseCase(UseCase {
                kind: UseCaseKind::Other,
                primary_actor: None,
                data_entities: vec![],
                scenarios: vec![Scenario::new(Ident::new("s1").unwrap(), ScenarioKind::Main, steps)],
            }),
        );
        let m = model("p").add_element(uc).unwrap();
        let canon = m.canonicalized();
        let scenario = &canon.elements[0].as_use_case().unwrap().scenarios[0];
        let orders: Vec<u32> = scenario.steps.iter().map(|s| s.order).collect();
        let actions: Vec<&str> = scenario.steps.iter().map(|s| s.action.as_str()).collect();
        assert_eq!(orders, vec![1, 2, 3]);
        assert_eq!(actions, vec!["first", "second", "third"]);
        assert!(canon.canonicalized().structural_eq(&canon));
    }

    #[test]
    fn structural_eq_ignores_spans() {
        let mut a = model("p").add_element(actor("a_User")).unwrap();
        let b = a.clone();
        a.elements[0].span = Some(crate::span::SourceSpan::point("f", 1, 1));
        a.source = Some("f".into());
        assert!(a.structural_eq(&b));
        let mut c = b.clone();
        c.elements[0].name = Some("changed".into());
        assert!(!a.structural_eq(&c));
    }

    #[test]
    fn duplicate_alias_rejected() {
        let mut m = model("p");
        m.add_import(ImportDecl::new(QualifiedName::parse("a.b").unwrap(), Some("x".into())).unwrap())
            .unwrap();
        let err = m
            .add_import(ImportDecl::new(QualifiedName::parse("c.d").unwrap(), Some("x".into())).unwrap())
            .unwrap_err();
        assert_eq!(err, ModelError::DuplicateAlias("x".into()));
    }

    #[test]
    fn slug_is_stable() {
        assert_eq!(Ident::slug("a_", "Customer Support rep!").as_str(), "a_customer_support_rep_");
        assert_eq!(Ident::slug("a_", "café").as_str(), "a_caf_");
    }
}

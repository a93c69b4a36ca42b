//! Specification elements and their closed vocabularies.
//!
//! Constructors validate structural rules (identifier shape, non-empty
//! texts, `PrimaryKey` implying `NotNull`). Everything that concerns
//! relations between elements — dangling references, duplicate scenario
//! ids, goal cycles — is deliberately representable and left to the
//! validator, so that files can be parsed before they are checked.

use std::fmt;

use crate::model::{Ident, ModelError};
use crate::span::SourceSpan;

/// Defines a closed vocabulary enum: `FromStr` (exact, case-sensitive),
/// `Display`, and the member list used in diagnostics and patterns.
macro_rules! vocabulary {
    ($(#[$meta:meta])* $name:ident { $($member:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($member,)+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$member,)+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$member => stringify!($member),)+
                }
            }

            /// The literal terms, for "allowed set" messages.
            pub fn members() -> Vec<&'static str> {
                vec![$(stringify!($member),)+]
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl std::str::FromStr for $name {
            type Err = ModelError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $(stringify!($member) => Ok($name::$member),)+
                    _ => Err(ModelError::UnknownVocabularyTerm {
                        term: s.to_string(),
                        allowed: Self::members(),
                    }),
                }
            }
        }
    };
}

vocabulary!(ActorKind { User, ExternalSystem, Timer, Other });
vocabulary!(EntityKind { Master, Transaction, Reference, Parameter, Other });
vocabulary!(DataType { Integer, Decimal, Boolean, Date, DateTime, Text });
vocabulary!(AttrConstraint { PrimaryKey, NotNull, Unique });
vocabulary!(UseCaseKind { EntityCreate, EntityBrowse, EntityManage, Report, Interaction, Other });
vocabulary!(ScenarioKind { Main, Alternative, Exception });
vocabulary!(Performer { Actor, System });
vocabulary!(Priority { Must, Should, Could, Wont, Unset });
vocabulary!(QrKind { Usability, Security, Performance, Reliability, Maintainability, Other });
vocabulary!(PartOfSpeech { Noun, Verb, Adjective });

vocabulary!(
    /// Discriminator for the element sum type.
    ElementKind {
        Actor,
        DataEntity,
        UseCase,
        UserStory,
        Goal,
        QualityRequirement,
        TestCase,
        GlossaryTerm,
    }
);

/// One attribute of a [`DataEntity`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataAttribute {
    pub name: Ident,
    pub datatype: DataType,
    /// Kept sorted in declaration order of [`AttrConstraint`].
    pub constraints: Vec<AttrConstraint>,
    /// Reference to a DataEntity id; validity is a checker concern.
    pub references: Option<Ident>,
    pub span: Option<SourceSpan>,
}

impl DataAttribute {
    /// Normalizes the constraint set: deduplicated, sorted, and
    /// `PrimaryKey` implies `NotNull`.
    pub fn new(
        name: Ident,
        datatype: DataType,
        constraints: impl IntoIterator<Item = AttrConstraint>,
        references: Option<Ident>,
    ) -> Self {
        let mut attr = DataAttribute {
            name,
            datatype,
            constraints: constraints.into_iter().collect(),
            references,
            span: None,
        };
        attr.normalize();
        attr
    }

    pub fn normalize(&mut self) {
        if self.constraints.contains(&AttrConstraint::PrimaryKey) {
            self.constraints.push(AttrConstraint::NotNull);
        }
        self.constraints.sort();
        self.constraints.dedup();
    }

    pub fn has(&self, c: AttrConstraint) -> bool {
        self.constraints.contains(&c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actor {
    pub kind: ActorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataEntity {
    pub kind: EntityKind,
    pub attributes: Vec<DataAttribute>,
}

impl DataEntity {
    /// The attribute carrying `PrimaryKey`, if exactly one exists.
    pub fn primary_key(&self) -> Option<&DataAttribute> {
        let mut keys = self
            .attributes
            .iter()
            .filter(|a| a.has(AttrConstraint::PrimaryKey));
        match (keys.next(), keys.next()) {
            (Some(k), None) => Some(k),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub order: u32,
    pub performer: Performer,
    pub action: String,
    pub span: Option<SourceSpan>,
}

impl Step {
    pub fn new(order: u32, performer: Performer, action: impl Into<String>) -> Result<Self, ModelError> {
        let action = action.into();
        if order == 0 {
            return Err(ModelError::NonPositiveOrder);
        }
        if action.trim().is_empty() {
            return Err(ModelError::EmptyText("step action"));
        }
        Ok(Step { order, performer, action, span: None })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub id: Ident,
    pub kind: ScenarioKind,
    pub steps: Vec<Step>,
    pub span: Option<SourceSpan>,
}

impl Scenario {
    pub fn new(id: Ident, kind: ScenarioKind, steps: Vec<Step>) -> Self {
        Scenario { id, kind, steps, span: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UseCase {
    pub kind: UseCaseKind,
    /// Reference to an Actor id. Unset is incomplete, not inconsistent.
    pub primary_actor: Option<Ident>,
    /// References to DataEntity ids.
    pub data_entities: Vec<Ident>,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserStory {
    /// Reference to an Actor id.
    pub as_a: Ident,
    pub i_want: String,
    pub so_that: Option<String>,
    pub priority: Priority,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    /// Reference to a parent Goal id.
    pub parent: Option<Ident>,
    pub priority: Priority,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualityRequirement {
    pub kind: QrKind,
    pub metric: Option<String>,
    pub target_value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    /// Reference to a UseCase or UserStory id.
    pub traces_to: Ident,
    /// Scenario id within the traced use case.
    pub scenario: Option<Ident>,
    pub given: Vec<String>,
    pub when: Vec<String>,
    pub then: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlossaryTerm {
    pub term: String,
    pub part_of_speech: PartOfSpeech,
    pub synonyms: Vec<String>,
    pub preferred: bool,
}

impl GlossaryTerm {
    /// Glossary ids are derived, not declared: `term_` plus the slugged term.
    pub fn derive_id(term: &str) -> Ident {
        Ident::slug("term_", term)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementBody {
    Actor(Actor),
    DataEntity(DataEntity),
    UseCase(UseCase),
    UserStory(UserStory),
    Goal(Goal),
    QualityRequirement(QualityRequirement),
    TestCase(TestCase),
    GlossaryTerm(GlossaryTerm),
}

impl ElementBody {
    pub fn kind(&self) -> ElementKind {
        match self {
            ElementBody::Actor(_) => ElementKind::Actor,
            ElementBody::DataEntity(_) => ElementKind::DataEntity,
            ElementBody::UseCase(_) => ElementKind::UseCase,
            ElementBody::UserStory(_) => ElementKind::UserStory,
            ElementBody::Goal(_) => ElementKind::Goal,
            ElementBody::QualityRequirement(_) => ElementKind::QualityRequirement,
            ElementBody::TestCase(_) => ElementKind::TestCase,
            ElementBody::GlossaryTerm(_) => ElementKind::GlossaryTerm,
        }
    }
}

/// One specification element: a local id, optional display text and
/// description, and the kind-specific body.
///
/// Derived equality includes spans; use [`SpecificationModel::structural_eq`]
/// (crate::model::SpecificationModel::structural_eq) to compare content.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: Ident,
    pub name: Option<String>,
    pub description: Option<String>,
    pub body: ElementBody,
    pub span: Option<SourceSpan>,
}

impl Element {
    pub fn new(id: Ident, body: ElementBody) -> Self {
        Element { id, name: None, description: None, body, span: None }
    }

    /// Builds a glossary element; the id is derived from the term. The
    /// definition is stored as the element description.
    pub fn glossary(
        term: impl Into<String>,
        part_of_speech: PartOfSpeech,
        definition: Option<String>,
        synonyms: Vec<String>,
        preferred: bool,
    ) -> Result<Self, ModelError> {
        let term = term.into();
        if term.trim().is_empty() {
            return Err(ModelError::EmptyText("glossary term"));
        }
        for s in &synonyms {
            if s.trim().is_empty() {
                return Err(ModelError::EmptyText("synonym"));
            }
            if s.eq_ignore_ascii_case(&term) {
                return Err(ModelError::SynonymEqualsTerm(term.clone()));
            }
        }
        let id = GlossaryTerm::derive_id(&term);
        let mut e = Element::new(
            id,
            ElementBody::GlossaryTerm(GlossaryTerm { term, part_of_speech, synonyms, preferred }),
        );
        e.description = definition.filter(|d| !d.is_empty());
        Ok(e)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        self.name = (!name.is_empty()).then_some(name);
        self
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        let description = description.into();
        self.description = (!description.is_empty()).then_some(description);
        self
    }

    pub fn with_span(mut self, span: SourceSpan) -> Self {
        self.span = Some(span);
        self
    }

    pub fn kind(&self) -> ElementKind {
        self.body.kind()
    }

    pub fn as_actor(&self) -> Option<&Actor> {
        match &self.body {
            ElementBody::Actor(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_entity(&self) -> Option<&DataEntity> {
        match &self.body {
            ElementBody::DataEntity(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_use_case(&self) -> Option<&UseCase> {
        match &self.body {
            ElementBody::UseCase(u) => Some(u),
            _ => None,
        }
    }

    pub fn as_user_story(&self) -> Option<&UserStory> {
        match &self.body {
            ElementBody::UserStory(u) => Some(u),
            _ => None,
        }
    }

    pub fn as_goal(&self) -> Option<&Goal> {
        match &self.body {
            ElementBody::Goal(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_quality_requirement(&self) -> Option<&QualityRequirement> {
        match &self.body {
            ElementBody::QualityRequirement(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_test_case(&self) -> Option<&TestCase> {
        match &self.body {
            ElementBody::TestCase(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_glossary_term(&self) -> Option<&GlossaryTerm> {
        match &self.body {
            ElementBody::GlossaryTerm(t) => Some(t),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primary_key_implies_not_null() {
        let attr = DataAttribute::new(
            Ident::new("ID").unwrap(),
            DataType::Integer,
            [AttrConstraint::PrimaryKey],
            None,
        );
        assert!(attr.has(AttrConstraint::NotNull));
        assert_eq!(attr.constraints, vec![AttrConstraint::PrimaryKey, AttrConstraint::NotNull]);
    }

    #[test]
    fn step_rejects_empty_action_and_zero_order() {
        assert!(Step::new(0, Performer::Actor, "x").is_err());
        assert!(Step::new(1, Performer::Actor, "  ").is_err());
        assert!(Step::new(1, Performer::System, "responds").is_ok());
    }

    #[test]
    fn vocabulary_round_trips_and_rejects() {
        assert_eq!("Master".parse::<EntityKind>().unwrap(), EntityKind::Master);
        let err = "Pilot".parse::<ActorKind>().unwrap_err();
        match err {
            ModelError::UnknownVocabularyTerm { allowed, .. } => {
                assert_eq!(allowed, vec!["User", "ExternalSystem", "Timer", "Other"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn glossary_rejects_self_synonym() {
        let err = Element::glossary("Order", PartOfSpeech::Noun, None, vec!["order".into()], true);
        assert!(err.is_err());
    }

    #[test]
    fn glossary_id_is_derived() {
        let e = Element::glossary("purchase order", PartOfSpeech::Noun, None, vec![], true).unwrap();
        assert_eq!(e.id.as_str(), "term_purchase_order");
    }
}

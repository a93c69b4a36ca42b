//! The built-in linguistic patterns (element rules + vocabulary rules) and
//! the styles that render them.

use once_cell::sync::Lazy;

use crate::model::element::*;
use crate::model::{Ident, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    One,
    Optional,
    Many,
}

impl std::fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Multiplicity::One => write!(f, "1"),
            Multiplicity::Optional => write!(f, "0..1"),
            Multiplicity::Many => write!(f, "0..n"),
        }
    }
}

/// One element rule: an attribute of the element kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeRule {
    pub name: &'static str,
    pub required: bool,
    pub multiplicity: Multiplicity,
}

/// One vocabulary rule: the closed literal set for an attribute. Nested
/// attributes use dotted paths (`scenarios.steps.performer`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularyRule {
    pub attribute: &'static str,
    pub terms: Vec<&'static str>,
}

/// The rule set for one element kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinguisticPattern {
    pub element_kind: ElementKind,
    pub attribute_rules: Vec<AttributeRule>,
    pub vocabulary_rules: Vec<VocabularyRule>,
}

impl LinguisticPattern {
    pub fn attribute(&self, name: &str) -> Option<&AttributeRule> {
        self.attribute_rules.iter().find(|r| r.name == name)
    }
}

fn rule(name: &'static str, required: bool, multiplicity: Multiplicity) -> AttributeRule {
    AttributeRule { name, required, multiplicity }
}

fn common_rules() -> Vec<AttributeRule> {
    vec![
        rule("id", true, Multiplicity::One),
        rule("name", false, Multiplicity::Optional),
        rule("description", false, Multiplicity::Optional),
    ]
}

fn pattern(
    element_kind: ElementKind,
    own: Vec<AttributeRule>,
    vocabulary_rules: Vec<VocabularyRule>,
) -> LinguisticPattern {
    let mut attribute_rules = common_rules();
    attribute_rules.extend(own);
    LinguisticPattern { element_kind, attribute_rules, vocabulary_rules }
}

fn vocab(attribute: &'static str, terms: Vec<&'static str>) -> VocabularyRule {
    VocabularyRule { attribute, terms }
}

static PATTERNS: Lazy<Vec<LinguisticPattern>> = Lazy::new(|| {
    use Multiplicity::*;
    vec![
        pattern(
            ElementKind::Actor,
            vec![rule("kind", true, One)],
            vec![vocab("kind", ActorKind::members())],
        ),
        pattern(
            ElementKind::DataEntity,
            vec![rule("kind", true, One), rule("attributes", false, Many)],
            vec![
                vocab("kind", EntityKind::members()),
                vocab("attributes.datatype", DataType::members()),
                vocab("attributes.constraints", AttrConstraint::members()),
            ],
        ),
        pattern(
            ElementKind::UseCase,
            vec![
                rule("kind", true, One),
                rule("primary_actor", true, One),
                rule("data_entities", false, Many),
                rule("scenarios", false, Many),
            ],
            vec![
                vocab("kind", UseCaseKind::members()),
                vocab("scenarios.kind", ScenarioKind::members()),
                vocab("scenarios.steps.performer", Performer::members()),
            ],
        ),
        pattern(
            ElementKind::UserStory,
            vec![
                rule("as_a", true, One),
                rule("i_want", true, One),
                rule("so_that", false, Optional),
                rule("priority", false, Optional),
            ],
            vec![vocab("priority", Priority::members())],
        ),
        pattern(
            ElementKind::Goal,
            vec![rule("parent", false, Optional), rule("priority", false, Optional)],
            vec![vocab("priority", Priority::members())],
        ),
        pattern(
            ElementKind::QualityRequirement,
            vec![
                rule("kind", true, One),
                rule("metric", false, Optional),
                rule("target_value", false, Optional),
            ],
            vec![vocab("kind", QrKind::members())],
        ),
        pattern(
            ElementKind::TestCase,
            vec![
                rule("traces_to", true, One),
                rule("scenario", false, Optional),
                rule("given", false, Many),
                rule("when", false, Many),
                rule("then", false, Many),
            ],
            vec![],
        ),
        pattern(
            ElementKind::GlossaryTerm,
            vec![
                rule("term", true, One),
                rule("part_of_speech", true, One),
                rule("definition", false, Optional),
                rule("synonyms", false, Many),
                rule("preferred", false, One),
            ],
            vec![vocab("part_of_speech", PartOfSpeech::members())],
        ),
    ]
});

/// The built-in pattern for a kind; total over known kinds.
pub fn pattern_for_kind(kind: ElementKind) -> &'static LinguisticPattern {
    PATTERNS
        .iter()
        .find(|p| p.element_kind == kind)
        .expect("every element kind has a built-in pattern")
}

/// Looks a pattern up by kind name; unknown names are an error.
pub fn pattern_for(kind: &str) -> Result<&'static LinguisticPattern, ModelError> {
    Ok(pattern_for_kind(kind.parse::<ElementKind>()?))
}

/// Collects the literal values an element holds at a vocabulary rule's
/// attribute path. Paths traverse collections (`scenarios.steps.performer`
/// yields the performer of every step of every scenario).
pub fn vocabulary_values(element: &Element, attribute: &str) -> Vec<String> {
    match (&element.body, attribute) {
        (ElementBody::Actor(a), "kind") => vec![a.kind.to_string()],
        (ElementBody::DataEntity(e), "kind") => vec![e.kind.to_string()],
        (ElementBody::DataEntity(e), "attributes.datatype") => {
            e.attributes.iter().map(|a| a.datatype.to_string()).collect()
        }
        (ElementBody::DataEntity(e), "attributes.constraints") => e
            .attributes
            .iter()
            .flat_map(|a| a.constraints.iter().map(|c| c.to_string()))
            .collect(),
        (ElementBody::UseCase(u), "kind") => vec![u.kind.to_string()],
        (ElementBody::UseCase(u), "scenarios.kind") => {
            u.scenarios.iter().map(|s| s.kind.to_string()).collect()
        }
        (ElementBody::UseCase(u), "scenarios.steps.performer") => u
            .scenarios
            .iter()
            .flat_map(|s| s.steps.iter().map(|st| st.performer.to_string()))
            .collect(),
        (ElementBody::UserStory(u), "priority") => vec![u.priority.to_string()],
        (ElementBody::Goal(g), "priority") => vec![g.priority.to_string()],
        (ElementBody::QualityRequirement(q), "kind") => vec![q.kind.to_string()],
        (ElementBody::GlossaryTerm(t), "part_of_speech") => vec![t.part_of_speech.to_string()],
        _ => vec![],
    }
}

/// A named textual rendering of one linguistic pattern. Templates carry
/// `{{attribute}}` placeholders only; block tags belong to document
/// templates, not styles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinguisticStyle {
    pub style_id: Ident,
    pub pattern: ElementKind,
    pub template: String,
}

impl LinguisticStyle {
    pub fn new(
        style_id: Ident,
        pattern: ElementKind,
        template: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let template = template.into();
        let rules = pattern_for_kind(pattern);
        for placeholder in placeholders(&template) {
            if rules.attribute(placeholder).is_none() {
                return Err(ModelError::UnknownStyleAttribute {
                    attribute: placeholder.to_string(),
                    kind: pattern.to_string(),
                });
            }
        }
        Ok(LinguisticStyle { style_id, pattern, template })
    }
}

/// The `{{...}}` placeholder names of a style template, in order.
pub fn placeholders(template: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(start) = rest.find("{{") {
        let after = &rest[start + 2..];
        match after.find("}}") {
            Some(end) => {
                out.push(after[..end].trim());
                rest = &after[end + 2..];
            }
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actor_pattern_matches_metamodel_vocabulary() {
        let p = pattern_for("Actor").unwrap();
        let kinds = &p.vocabulary_rules.iter().find(|v| v.attribute == "kind").unwrap().terms;
        assert_eq!(kinds, &vec!["User", "ExternalSystem", "Timer", "Other"]);
    }

    #[test]
    fn use_case_pattern_has_required_actor_and_many_scenarios() {
        let p = pattern_for("UseCase").unwrap();
        let actor = p.attribute("primary_actor").unwrap();
        assert!(actor.required);
        let scenarios = p.attribute("scenarios").unwrap();
        assert_eq!(scenarios.multiplicity, Multiplicity::Many);
    }

    #[test]
    fn unknown_kind_is_an_error() {
        assert!(pattern_for("Banana").is_err());
    }

    #[test]
    fn every_kind_has_a_pattern_with_common_rules() {
        for kind in ElementKind::ALL {
            let p = pattern_for_kind(*kind);
            assert!(p.attribute("id").unwrap().required);
            assert!(p.attribute("name").is_some());
            assert!(p.attribute("description").is_some());
        }
    }

    #[test]
    fn style_placeholders_are_validated() {
        let id = Ident::new("story_sentence").unwrap();
        let ok = LinguisticStyle::new(
            id.clone(),
            ElementKind::UserStory,
            "As a {{as_a}}, I want {{i_want}} so that {{so_that}}.",
        );
        assert!(ok.is_ok());
        let bad = LinguisticStyle::new(id, ElementKind::UserStory, "{{nonexistent}}");
        assert!(bad.is_err());
    }
}

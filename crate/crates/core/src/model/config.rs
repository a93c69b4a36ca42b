//! Quality-check configuration: which kinds a model must contain, named
//! viewpoints, per-kind construct rules and the vague-term lexicon.

use crate::model::ElementKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    ErrorsOnly,
    WarningsAsErrors,
}

/// Configuration for the completeness and ambiguity checkers. Loaded from
/// `rslcheck.json`; [`CheckConfig::default`] is the shipped fallback.
///
/// Entry order is preserved so diagnostic order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    /// Kinds that must have at least one instance (model level).
    pub model_required_kinds: Vec<ElementKind>,
    /// Named kind-sets; a viewpoint is satisfied by at least one instance
    /// of any of its kinds.
    pub viewpoints: Vec<(String, Vec<ElementKind>)>,
    /// Per-kind rule tokens: `<field>:set` or `<collection>>=<n>`.
    pub construct_rules: Vec<(ElementKind, Vec<String>)>,
    /// Lowercase terms flagged by the ambiguity checker (whole word,
    /// case-insensitive).
    pub vague_terms: Vec<String>,
    pub strictness: Strictness,
}

impl CheckConfig {
    /// A configuration that checks nothing beyond consistency.
    pub fn empty() -> Self {
        CheckConfig {
            model_required_kinds: Vec::new(),
            viewpoints: Vec::new(),
            construct_rules: Vec::new(),
            vague_terms: Vec::new(),
            strictness: Strictness::ErrorsOnly,
        }
    }
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            model_required_kinds: vec![ElementKind::Actor, ElementKind::UseCase],
            viewpoints: vec![
                ("actors".to_string(), vec![ElementKind::Actor]),
                (
                    "behaviour".to_string(),
                    vec![ElementKind::UseCase, ElementKind::UserStory],
                ),
                ("data".to_string(), vec![ElementKind::DataEntity]),
            ],
            construct_rules: vec![
                (
                    ElementKind::UseCase,
                    vec![
                        "primary_actor:set".to_string(),
                        "scenarios>=1".to_string(),
                        "scenarios.steps>=1".to_string(),
                    ],
                ),
                (ElementKind::DataEntity, vec!["attributes>=1".to_string()]),
            ],
            vague_terms: [
                "user-friendly",
                "fast",
                "efficient",
                "appropriate",
                "adequate",
                "flexible",
                "robust",
                "easy",
                "simple",
                "several",
                "some",
                "etc",
                "as appropriate",
                "if possible",
                "TBD",
            ]
            .into_iter()
            .map(str::to_string)
            .collect(),
            strictness: Strictness::ErrorsOnly,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lexicon_has_fifteen_entries() {
        assert_eq!(CheckConfig::default().vague_terms.len(), 15);
    }
}

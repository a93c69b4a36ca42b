//! The "check quality" step: consistency, configurable completeness and
//! ambiguity analysis over a model.
//!
//! Checkers are pure functions of `(model, config)` and their diagnostic
//! order is deterministic: elements in model order, fields in metamodel
//! order, configuration entries in file order. Findings are data, not
//! failures — an inconsistent model checks fine, it just reports errors.

use std::collections::HashSet;

use regex::Regex;
use serde_json::{json, Map, Value};

use crate::diag::{Code, Diagnostic, Severity};
use crate::model::*;
use crate::span::SourceSpan;

/// Outcome of [`check_all`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub counts: Counts,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub errors: usize,
    pub warnings: usize,
    pub infos: usize,
}

impl Counts {
    pub fn tally(diagnostics: &[Diagnostic]) -> Counts {
        let mut counts = Counts::default();
        for d in diagnostics {
            match d.severity {
                Severity::Error => counts.errors += 1,
                Severity::Warning => counts.warnings += 1,
                Severity::Info => counts.infos += 1,
            }
        }
        counts
    }
}

/// Runs the three checkers in the order consistency, completeness,
/// ambiguity and computes the verdict. Under `WarningsAsErrors` a single
/// warning fails the run.
pub fn check_all(model: &SpecificationModel, config: &CheckConfig) -> ValidationReport {
    let mut diagnostics = check_consistency(model);
    diagnostics.extend(check_completeness(model, config));
    diagnostics.extend(check_ambiguity(model, config));
    let counts = Counts::tally(&diagnostics);
    let passed = match config.strictness {
        Strictness::ErrorsOnly => counts.errors == 0,
        Strictness::WarningsAsErrors => counts.errors == 0 && counts.warnings == 0,
    };
    ValidationReport { diagnostics, counts, passed }
}

// ---------------------------------------------------------------------------
// Consistency
// ---------------------------------------------------------------------------

fn expected_kind_name(kinds: &[ElementKind]) -> String {
    kinds.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(" or ")
}

struct ConsistencyChecker<'a> {
    model: &'a SpecificationModel,
    out: Vec<Diagnostic>,
}

impl<'a> ConsistencyChecker<'a> {
    /// `RSL-C010` when the reference dangles, `RSL-C011` when it lands on
    /// the wrong kind. Returns the target element when it is usable.
    fn reference(
        &mut self,
        target: &Ident,
        expected: &[ElementKind],
        context: &str,
        span: Option<&SourceSpan>,
    ) -> Option<&'a Element> {
        match self.model.resolve(target.as_str()) {
            None => {
                self.out.push(Diagnostic::new(
                    Code::C010,
                    span.cloned(),
                    format!("unresolved reference '{target}' ({context})"),
                ));
                None
            }
            Some(e) if !expected.contains(&e.kind()) => {
                self.out.push(Diagnostic::new(
                    Code::C011,
                    span.cloned(),
                    format!(
                        "'{target}' ({context}) must be a {} but resolves to a {}",
                        expected_kind_name(expected),
                        e.kind()
                    ),
                ));
                None
            }
            Some(e) => Some(e),
        }
    }

    fn use_case(&mut self, element: &Element, uc: &UseCase) {
        let span = element.span.as_ref();
        if let Some(actor) = &uc.primary_actor {
            self.reference(
                actor,
                &[ElementKind::Actor],
                &format!("primary actor of {}", element.id),
                span,
            );
        }
        for entity in &uc.data_entities {
            self.reference(
                entity,
                &[ElementKind::DataEntity],
                &format!("data entity of {}", element.id),
                span,
            );
        }
        let mut seen_ids: HashSet<&str> = HashSet::new();
        let mut main_seen = false;
        for scenario in &uc.scenarios {
            let scenario_span = scenario.span.as_ref().or(span);
            if !seen_ids.insert(scenario.id.as_str()) {
                self.out.push(Diagnostic::new(
                    Code::C013,
                    scenario_span.cloned(),
                    format!("duplicate scenario id '{}' in use case {}", scenario.id, element.id),
                ));
            }
            if scenario.kind == ScenarioKind::Main {
                if main_seen {
                    self.out.push(Diagnostic::new(
                        Code::C015,
                        scenario_span.cloned(),
                        format!("use case {} declares more than one Main scenario", element.id),
                    ));
                }
                main_seen = true;
            }
            let mut last: Option<u32> = None;
            for step in &scenario.steps {
                if let Some(prev) = last {
                    if step.order <= prev {
                        self.out.push(Diagnostic::new(
                            Code::C012,
                            step.span.as_ref().or(scenario_span).cloned(),
                            format!(
                                "step order {} after {} in scenario '{}' of {} (orders must ascend)",
                                step.order, prev, scenario.id, element.id
                            ),
                        ));
                    }
                }
                last = Some(step.order);
            }
        }
    }

    fn data_entity(&mut self, element: &Element, entity: &DataEntity) {
        let mut seen: HashSet<&str> = HashSet::new();
        let mut pk_seen = false;
        for attr in &entity.attributes {
            let span = attr.span.as_ref().or(element.span.as_ref());
            if !seen.insert(attr.name.as_str()) {
                self.out.push(Diagnostic::new(
                    Code::C017,
                    span.cloned(),
                    format!("duplicate attribute name '{}' in {}", attr.name, element.id),
                ));
            }
            if attr.has(AttrConstraint::PrimaryKey) {
                if pk_seen {
                    self.out.push(Diagnostic::new(
                        Code::C018,
                        span.cloned(),
                        format!("{} declares more than one PrimaryKey attribute", element.id),
                    ));
                }
                pk_seen = true;
            }
            if let Some(target) = &attr.references {
                self.reference(
                    target,
                    &[ElementKind::DataEntity],
                    &format!("foreign key {}.{}", element.id, attr.name),
                    span,
                );
                if !matches!(attr.datatype, DataType::Integer | DataType::Text) {
                    self.out.push(Diagnostic::new(
                        Code::C016,
                        span.cloned(),
                        format!(
                            "foreign key {}.{} has datatype {} (must be Integer or Text)",
                            element.id, attr.name, attr.datatype
                        ),
                    ));
                }
            }
        }
    }

    fn test_case(&mut self, element: &Element, tc: &TestCase) {
        let span = element.span.as_ref();
        let traced = self.reference(
            &tc.traces_to,
            &[ElementKind::UseCase, ElementKind::UserStory],
            &format!("traces of {}", element.id),
            span,
        );
        if let Some(scenario_id) = &tc.scenario {
            match traced {
                Some(t) => match &t.body {
                    ElementBody::UseCase(uc) => {
                        if !uc.scenarios.iter().any(|s| &s.id == scenario_id) {
                            self.out.push(Diagnostic::new(
                                Code::C010,
                                span.cloned(),
                                format!(
                                    "unresolved reference '{scenario_id}' (scenario of {} in use case {})",
                                    element.id, tc.traces_to
                                ),
                            ));
                        }
                    }
                    _ => {
                        self.out.push(Diagnostic::new(
                            Code::C011,
                            span.cloned(),
                            format!(
                                "{} names scenario '{scenario_id}' but traces a {}",
                                element.id,
                                t.kind()
                            ),
                        ));
                    }
                },
                None => {}
            }
        }
    }

    /// Goal parent chains must form a forest; every distinct cycle is
    /// reported once, at its first goal in model order.
    fn goal_cycles(&mut self) {
        let mut reported: HashSet<String> = HashSet::new();
        for element in self.model.elements_of(ElementKind::Goal) {
            if reported.contains(element.id.as_str()) {
                continue;
            }
            let mut path: Vec<&str> = vec![element.id.as_str()];
            let mut current = element;
            loop {
                let parent_id = match &current.body {
                    ElementBody::Goal(g) => match &g.parent {
                        Some(p) => p,
                        None => break,
                    },
                    _ => break,
                };
                let parent = match self.model.resolve(parent_id.as_str()) {
                    Some(p) if p.kind() == ElementKind::Goal => p,
                    // Dangling or wrong-kind parents are C010/C011 findings.
                    _ => break,
                };
                if let Some(at) = path.iter().position(|id| *id == parent.id.as_str()) {
                    let cycle: Vec<&str> = path[at..].to_vec();
                    for id in &cycle {
                        reported.insert((*id).to_string());
                    }
                    let mut rendered = cycle.join(" -> ");
                    rendered.push_str(" -> ");
                    rendered.push_str(cycle[0]);
                    self.out.push(Diagnostic::new(
                        Code::C014,
                        element.span.clone(),
                        format!("goal partOf cycle: {rendered}"),
                    ));
                    break;
                }
                path.push(parent.id.as_str());
                current = parent;
            }
        }
    }
}

/// Referential integrity, numeric sequences and structural attribute
/// checks, with stable codes `RSL-C010` through `RSL-C018`.
pub fn check_consistency(model: &SpecificationModel) -> Vec<Diagnostic> {
    let mut checker = ConsistencyChecker { model, out: Vec::new() };
    for element in &model.elements {
        match &element.body {
            ElementBody::UseCase(uc) => checker.use_case(element, uc),
            ElementBody::DataEntity(entity) => checker.data_entity(element, entity),
            ElementBody::UserStory(story) => {
                checker.reference(
                    &story.as_a,
                    &[ElementKind::Actor],
                    &format!("asA of {}", element.id),
                    element.span.as_ref(),
                );
            }
            ElementBody::Goal(goal) => {
                if let Some(parent) = &goal.parent {
                    checker.reference(
                        parent,
                        &[ElementKind::Goal],
                        &format!("partOf of {}", element.id),
                        element.span.as_ref(),
                    );
                }
            }
            ElementBody::TestCase(tc) => checker.test_case(element, tc),
            _ => {}
        }
    }
    checker.goal_cycles();
    checker.out
}

// ---------------------------------------------------------------------------
// Completeness
// ---------------------------------------------------------------------------

enum ConstructRule {
    FieldSet(String),
    CountAtLeast(String, usize),
}

fn parse_rule_token(token: &str) -> Option<ConstructRule> {
    if let Some((path, n)) = token.split_once(">=") {
        let n: usize = n.trim().parse().ok()?;
        let path = path.trim();
        if path.is_empty() {
            return None;
        }
        return Some(ConstructRule::CountAtLeast(path.to_string(), n));
    }
    if let Some((field, tail)) = token.split_once(':') {
        if tail.trim() == "set" && !field.trim().is_empty() {
            return Some(ConstructRule::FieldSet(field.trim().to_string()));
        }
    }
    None
}

enum FieldView {
    Unset,
    Set,
    Count(usize),
    /// Per-item counts for one-level nested collections, labelled for
    /// messages (`scenarios.steps` yields one entry per scenario).
    PerItem(Vec<(String, usize)>),
}

fn field_view(element: &Element, path: &str) -> Option<FieldView> {
    fn opt(o: &Option<String>) -> FieldView {
        if o.is_some() {
            FieldView::Set
        } else {
            FieldView::Unset
        }
    }
    fn opt_ident(o: &Option<Ident>) -> FieldView {
        if o.is_some() {
            FieldView::Set
        } else {
            FieldView::Unset
        }
    }
    fn priority(p: Priority) -> FieldView {
        if p == Priority::Unset {
            FieldView::Unset
        } else {
            FieldView::Set
        }
    }
    match path {
        "name" => return Some(opt(&element.name)),
        "description" | "definition" => return Some(opt(&element.description)),
        "id" => return Some(FieldView::Set),
        _ => {}
    }
    Some(match (&element.body, path) {
        (ElementBody::Actor(_), "kind") => FieldView::Set,
        (ElementBody::DataEntity(_), "kind") => FieldView::Set,
        (ElementBody::DataEntity(e), "attributes") => FieldView::Count(e.attributes.len()),
        (ElementBody::UseCase(_), "kind") => FieldView::Set,
        (ElementBody::UseCase(u), "primary_actor") => opt_ident(&u.primary_actor),
        (ElementBody::UseCase(u), "data_entities") => FieldView::Count(u.data_entities.len()),
        (ElementBody::UseCase(u), "scenarios") => FieldView::Count(u.scenarios.len()),
        (ElementBody::UseCase(u), "scenarios.steps") => FieldView::PerItem(
            u.scenarios.iter().map(|s| (s.id.to_string(), s.steps.len())).collect(),
        ),
        (ElementBody::UserStory(_), "as_a") => FieldView::Set,
        (ElementBody::UserStory(_), "i_want") => FieldView::Set,
        (ElementBody::UserStory(s), "so_that") => opt(&s.so_that),
        (ElementBody::UserStory(s), "priority") => priority(s.priority),
        (ElementBody::Goal(g), "parent") => opt_ident(&g.parent),
        (ElementBody::Goal(g), "priority") => priority(g.priority),
        (ElementBody::QualityRequirement(_), "kind") => FieldView::Set,
        (ElementBody::QualityRequirement(q), "metric") => opt(&q.metric),
        (ElementBody::QualityRequirement(q), "target_value") => opt(&q.target_value),
        (ElementBody::TestCase(_), "traces_to") => FieldView::Set,
        (ElementBody::TestCase(t), "scenario") => opt_ident(&t.scenario),
        (ElementBody::TestCase(t), "given") => FieldView::Count(t.given.len()),
        (ElementBody::TestCase(t), "when") => FieldView::Count(t.when.len()),
        (ElementBody::TestCase(t), "then") => FieldView::Count(t.then.len()),
        (ElementBody::GlossaryTerm(_), "term") => FieldView::Set,
        (ElementBody::GlossaryTerm(_), "part_of_speech") => FieldView::Set,
        (ElementBody::GlossaryTerm(t), "synonyms") => FieldView::Count(t.synonyms.len()),
        (ElementBody::GlossaryTerm(_), "preferred") => FieldView::Set,
        _ => return None,
    })
}

/// Does the rule's path name an attribute of the kind's pattern?
fn rule_path_known(kind: ElementKind, path: &str) -> bool {
    if path == "scenarios.steps" {
        return kind == ElementKind::UseCase;
    }
    pattern_for_kind(kind).attribute(path).is_some()
}

/// Three-level completeness. Model level: `RSL-X010` per required kind
/// with zero instances. Viewpoint level: `RSL-X011` per viewpoint whose
/// kind set has zero total instances. Construct level: `RSL-X012` per
/// element violating a rule token. Findings are warnings, escalated to
/// errors under `WarningsAsErrors`; malformed rule tokens are `RSL-X001`.
pub fn check_completeness(model: &SpecificationModel, config: &CheckConfig) -> Vec<Diagnostic> {
    let severity = match config.strictness {
        Strictness::ErrorsOnly => Severity::Warning,
        Strictness::WarningsAsErrors => Severity::Error,
    };
    let mut out = Vec::new();

    let mut seen_kinds: Vec<ElementKind> = Vec::new();
    for kind in &config.model_required_kinds {
        if seen_kinds.contains(kind) {
            continue;
        }
        seen_kinds.push(*kind);
        if model.elements_of(*kind).next().is_none() {
            out.push(
                Diagnostic::new(Code::X010, None, format!("model has no {kind} elements"))
                    .with_severity(severity),
            );
        }
    }

    for (viewpoint, kinds) in &config.viewpoints {
        let total: usize = kinds.iter().map(|k| model.elements_of(*k).count()).sum();
        if total == 0 {
            let names = expected_kind_name(kinds);
            out.push(
                Diagnostic::new(
                    Code::X011,
                    None,
                    format!("viewpoint '{viewpoint}' has no instances (expects {names})"),
                )
                .with_severity(severity),
            );
        }
    }

    for (kind, tokens) in &config.construct_rules {
        for token in tokens {
            let rule = match parse_rule_token(token) {
                Some(rule) => rule,
                None => {
                    out.push(Diagnostic::new(
                        Code::X001,
                        None,
                        format!("malformed construct rule '{token}' for {kind}"),
                    ));
                    continue;
                }
            };
            let path = match &rule {
                ConstructRule::FieldSet(p) | ConstructRule::CountAtLeast(p, _) => p.clone(),
            };
            if !rule_path_known(*kind, &path) {
                out.push(Diagnostic::new(
                    Code::X001,
                    None,
                    format!("construct rule '{token}': '{path}' is not an attribute of {kind}"),
                ));
                continue;
            }
            for element in model.elements_of(*kind) {
                let view = match field_view(element, &path) {
                    Some(v) => v,
                    None => continue,
                };
                let violation = match (&rule, view) {
                    (ConstructRule::FieldSet(_), FieldView::Unset) => {
                        Some(format!("'{path}' is not set"))
                    }
                    (ConstructRule::FieldSet(_), FieldView::Count(0)) => {
                        Some(format!("'{path}' is empty"))
                    }
                    (ConstructRule::CountAtLeast(_, n), FieldView::Count(have)) if have < *n => {
                        Some(format!("'{path}' has {have} entries, rule requires >={n}"))
                    }
                    (ConstructRule::CountAtLeast(_, n), FieldView::PerItem(items)) => items
                        .iter()
                        .find(|(_, have)| have < n)
                        .map(|(label, have)| {
                            format!("'{path}' of '{label}' has {have} entries, rule requires >={n}")
                        }),
                    _ => None,
                };
                if let Some(why) = violation {
                    out.push(
                        Diagnostic::new(
                            Code::X012,
                            element.span.clone(),
                            format!("{kind} {}: {why}", element.id),
                        )
                        .with_severity(severity),
                    );
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Ambiguity
// ---------------------------------------------------------------------------

/// Whole-word, case-insensitive matcher for a lexicon term or synonym.
fn word_regex(term: &str) -> Regex {
    Regex::new(&format!(r"(?i)\b{}\b", regex::escape(term))).expect("escaped term is a valid regex")
}

/// The text-bearing fields the ambiguity checks scan: element names,
/// descriptions, step actions and user-story iWant texts. Glossary
/// entries define terminology and are exempt.
fn scanned_texts(element: &Element) -> Vec<(String, &str, Option<&SourceSpan>)> {
    if element.kind() == ElementKind::GlossaryTerm {
        return Vec::new();
    }
    let mut texts: Vec<(String, &str, Option<&SourceSpan>)> = Vec::new();
    let espan = element.span.as_ref();
    if let Some(name) = &element.name {
        texts.push((format!("name of {}", element.id), name, espan));
    }
    if let Some(description) = &element.description {
        texts.push((format!("description of {}", element.id), description, espan));
    }
    match &element.body {
        ElementBody::UseCase(uc) => {
            for scenario in &uc.scenarios {
                for step in &scenario.steps {
                    texts.push((
                        format!(
                            "step {} of scenario '{}' in {}",
                            step.order, scenario.id, element.id
                        ),
                        &step.action,
                        step.span.as_ref().or(scenario.span.as_ref()).or(espan),
                    ));
                }
            }
        }
        ElementBody::UserStory(story) => {
            texts.push((format!("iWant of {}", element.id), &story.i_want, espan));
        }
        _ => {}
    }
    texts
}

/// Vague-term and terminology checks, all warnings: `RSL-A010` per vague
/// lexicon hit, `RSL-A011` per non-preferred synonym with a suggestion,
/// `RSL-A012` per pair of preferred terms claiming each other as synonyms.
pub fn check_ambiguity(model: &SpecificationModel, config: &CheckConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let vague: Vec<(&str, Regex)> =
        config.vague_terms.iter().map(|t| (t.as_str(), word_regex(t))).collect();

    // (matcher, synonym, preferred term) for every preferred glossary entry.
    let mut synonyms: Vec<(Regex, &str, &str)> = Vec::new();
    for element in model.elements_of(ElementKind::GlossaryTerm) {
        if let ElementBody::GlossaryTerm(term) = &element.body {
            if term.preferred {
                for synonym in &term.synonyms {
                    synonyms.push((word_regex(synonym), synonym, &term.term));
                }
            }
        }
    }

    for element in &model.elements {
        for (context, text, span) in scanned_texts(element) {
            for (term, re) in &vague {
                for _ in re.find_iter(text) {
                    out.push(Diagnostic::new(
                        Code::A010,
                        span.cloned(),
                        format!("vague term '{term}' in {context}"),
                    ));
                }
            }
            for (re, synonym, preferred) in &synonyms {
                for _ in re.find_iter(text) {
                    out.push(Diagnostic::new(
                        Code::A011,
                        span.cloned(),
                        format!("non-preferred term '{synonym}' in {context}; prefer '{preferred}'"),
                    ));
                }
            }
        }
    }

    let glossary: Vec<&Element> = model.elements_of(ElementKind::GlossaryTerm).collect();
    for (i, first) in glossary.iter().enumerate() {
        for second in &glossary[i + 1..] {
            let (a, b) = match (&first.body, &second.body) {
                (ElementBody::GlossaryTerm(a), ElementBody::GlossaryTerm(b)) => (a, b),
                _ => continue,
            };
            if !(a.preferred && b.preferred) {
                continue;
            }
            let a_claims_b = a.synonyms.iter().any(|s| s.eq_ignore_ascii_case(&b.term));
            let b_claims_a = b.synonyms.iter().any(|s| s.eq_ignore_ascii_case(&a.term));
            if a_claims_b && b_claims_a {
                let mut d = Diagnostic::new(
                    Code::A012,
                    second.span.clone(),
                    format!(
                        "preferred terms '{}' and '{}' declare each other as synonyms",
                        a.term, b.term
                    ),
                );
                if let Some(span) = &first.span {
                    d = d.with_related(span.clone(), format!("'{}' declared here", a.term));
                }
                out.push(d);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Configuration file (rslcheck.json)
// ---------------------------------------------------------------------------

/// Removes `//` line comments (outside string literals) so the shipped
/// configuration can be commented.
fn strip_line_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    let mut in_string = false;
    while let Some(c) = chars.next() {
        match c {
            '"' => {
                in_string = !in_string;
                out.push(c);
            }
            '\\' if in_string => {
                out.push(c);
                if let Some(escaped) = chars.next() {
                    out.push(escaped);
                }
            }
            '/' if !in_string && chars.peek() == Some(&'/') => {
                for skipped in chars.by_ref() {
                    if skipped == '\n' {
                        out.push('\n');
                        break;
                    }
                }
            }
            _ => out.push(c),
        }
    }
    out
}

fn kind_list(value: &Value, context: &str) -> Result<Vec<ElementKind>, String> {
    let arr = value.as_array().ok_or_else(|| format!("{context} must be an array"))?;
    arr.iter()
        .map(|v| {
            let s = v.as_str().ok_or_else(|| format!("{context} entries must be strings"))?;
            s.parse::<ElementKind>().map_err(|e| format!("{context}: {e}"))
        })
        .collect()
}

/// Parses an `rslcheck.json` document. Keys: `modelRequiredKinds`,
/// `viewpoints`, `constructRules`, `vagueTerms`, `strictness`; all
/// optional, unknown keys rejected. `//` comments are allowed.
pub fn parse_config(text: &str) -> Result<CheckConfig, String> {
    let stripped = strip_line_comments(text);
    let value: Value = serde_json::from_str(&stripped).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value.as_object().ok_or("configuration must be a JSON object")?;

    let mut config = CheckConfig::empty();
    for (key, v) in obj {
        match key.as_str() {
            "modelRequiredKinds" => {
                config.model_required_kinds = kind_list(v, "modelRequiredKinds")?;
            }
            "viewpoints" => {
                let map = v.as_object().ok_or("viewpoints must be an object")?;
                for (name, kinds) in map {
                    config
                        .viewpoints
                        .push((name.clone(), kind_list(kinds, &format!("viewpoint '{name}'"))?));
                }
            }
            "constructRules" => {
                let map = v.as_object().ok_or("constructRules must be an object")?;
                for (kind, tokens) in map {
                    let kind: ElementKind =
                        kind.parse().map_err(|e| format!("constructRules: {e}"))?;
                    let tokens = tokens
                        .as_array()
                        .ok_or("constructRules values must be arrays")?
                        .iter()
                        .map(|t| {
                            t.as_str()
                                .map(str::to_string)
                                .ok_or_else(|| "construct rule tokens must be strings".to_string())
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    config.construct_rules.push((kind, tokens));
                }
            }
            "vagueTerms" => {
                let arr = v.as_array().ok_or("vagueTerms must be an array")?;
                config.vague_terms = arr
                    .iter()
                    .map(|t| {
                        t.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| "vagueTerms entries must be strings".to_string())
                    })
                    .collect::<Result<Vec<_>, _>>()?;
            }
            "strictness" => {
                config.strictness = match v.as_str() {
                    Some("ErrorsOnly") => Strictness::ErrorsOnly,
                    Some("WarningsAsErrors") => Strictness::WarningsAsErrors,
                    _ => return Err("strictness must be 'ErrorsOnly' or 'WarningsAsErrors'".into()),
                };
            }
            other => return Err(format!("unknown configuration key '{other}'")),
        }
    }
    Ok(config)
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

pub fn diagnostic_to_json(d: &Diagnostic) -> Value {
    let mut obj = Map::new();
    obj.insert("severity".into(), json!(d.severity.to_string()));
    obj.insert("code".into(), json!(d.code.as_str()));
    if let Some(span) = &d.span {
        obj.insert("file".into(), json!(span.file));
        obj.insert("line".into(), json!(span.start_line));
        obj.insert("col".into(), json!(span.start_col));
        obj.insert("endLine".into(), json!(span.end_line));
        obj.insert("endCol".into(), json!(span.end_col));
    }
    obj.insert("message".into(), json!(d.message));
    Value::Object(obj)
}

/// Stable JSON rendering of a report (fixed key order) for `--format json`.
pub fn report_to_json(report: &ValidationReport) -> Value {
    json!({
        "passed": report.passed,
        "counts": {
            "errors": report.counts.errors,
            "warnings": report.counts.warnings,
            "infos": report.counts.infos,
        },
        "diagnostics": report.diagnostics.iter().map(diagnostic_to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn model_of(src: &str) -> SpecificationModel {
        let result = parse(src, "test.rsl");
        assert!(result.diagnostics.is_empty(), "fixture must parse: {:?}", result.diagnostics);
        result.model.unwrap()
    }

    #[test]
    fn dangling_primary_actor_reports_exactly_one_c010() {
        let m = model_of("Package p { UseCase uc_1 : Other [ actorInitiates a_Ghost ] }");
        let diags = check_consistency(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::C010);
        assert!(diags[0].message.contains("a_Ghost"));
    }

    #[test]
    fn two_goal_cycle_reports_c014_listing_the_cycle() {
        let m = model_of("Package p { Goal g1 [ partOf g2 ] Goal g2 [ partOf g1 ] }");
        let diags = check_consistency(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::C014);
        assert!(diags[0].message.contains("g1 -> g2 -> g1"));
    }

    #[test]
    fn self_loop_goal_is_a_cycle() {
        let m = model_of("Package p { Goal g [ partOf g ] }");
        let diags = check_consistency(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::C014);
    }

    #[test]
    fn wrong_kind_reference_reports_c011() {
        let m =
            model_of("Package p { DataEntity e : Master [] UserStory us [ asA e iWant \"x\" ] }");
        let diags = check_consistency(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::C011);
    }

    #[test]
    fn step_order_violations_report_c012() {
        let m = model_of(
            "Package p { UseCase u : Other [ scenario s : Main [ step 2 : Actor \"a\" step 2 : System \"b\" step 1 : Actor \"c\" ] ] }",
        );
        let codes: Vec<Code> = check_consistency(&m).iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::C012, Code::C012]);
    }

    #[test]
    fn fk_datatype_violation_reports_c016() {
        let m = model_of(
            "Package p { DataEntity a : Master [ attribute ID : Integer constraints (PrimaryKey) ] DataEntity b : Master [ attribute x : Boolean references a ] }",
        );
        let diags = check_consistency(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::C016);
    }

    #[test]
    fn missing_required_kind_reports_one_x010() {
        let m = model_of("Package p { Actor a : User }");
        let mut config = CheckConfig::empty();
        config.model_required_kinds = vec![ElementKind::UseCase];
        let diags = check_completeness(&m, &config);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::X010);
    }

    #[test]
    fn construct_rule_flags_empty_scenarios() {
        let m = model_of("Package p { UseCase u : Other [ actorInitiates a ] Actor a : User }");
        let mut config = CheckConfig::empty();
        config.construct_rules = vec![(ElementKind::UseCase, vec!["scenarios>=1".into()])];
        let diags = check_completeness(&m, &config);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::X012);
        assert!(diags[0].message.contains('u'));
    }

    #[test]
    fn malformed_rule_token_reports_x001() {
        let m = model_of("Package p {}");
        let mut config = CheckConfig::empty();
        config.construct_rules = vec![(ElementKind::UseCase, vec!["scenarios>>1".into()])];
        let diags = check_completeness(&m, &config);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::X001);
        assert!(diags[0].is_error());
    }

    #[test]
    fn vague_term_matches_whole_words_only() {
        let m = model_of(
            "Package p { UseCase u : Other [ scenario s : Main [ step 1 : System \"responds fast\" step 2 : Actor \"eats breakfast\" ] ] }",
        );
        let config = CheckConfig::default();
        let diags = check_ambiguity(&m, &config);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].code, Code::A010);
        assert!(diags[0].message.contains("'fast'"));
        assert!(diags[0].message.contains("step 1"));
    }

    #[test]
    fn synonym_usage_suggests_preferred_term() {
        let m = model_of(
            "Package p { Term \"order\" : Noun [ synonym \"purchase\" ] UseCase u : Other [ scenario s : Main [ step 1 : Actor \"creates a purchase\" ] ] }",
        );
        let diags = check_ambiguity(&m, &CheckConfig::empty());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::A011);
        assert!(diags[0].message.contains("prefer 'order'"));
    }

    #[test]
    fn mutual_preferred_synonyms_report_a012() {
        let m = model_of(
            "Package p { Term \"order\" : Noun [ synonym \"purchase\" ] Term \"purchase\" : Noun [ synonym \"order\" ] }",
        );
        let diags = check_ambiguity(&m, &CheckConfig::empty());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::A012);
    }

    #[test]
    fn warnings_as_errors_fails_the_run_and_escalates_completeness() {
        let m = model_of("Package p { Actor a : User }");
        let mut config = CheckConfig::empty();
        config.model_required_kinds = vec![ElementKind::UseCase];
        config.strictness = Strictness::WarningsAsErrors;
        let report = check_all(&m, &config);
        assert!(!report.passed);
        assert_eq!(report.counts.errors, 1);
        assert_eq!(report.counts.warnings, 0);
    }

    #[test]
    fn check_all_concatenates_in_documented_order() {
        let src = "Package p { Goal g [ partOf g ] UseCase u : Other [ scenario s : Main [ step 1 : System \"replies fast\" ] ] }";
        let m = model_of(src);
        let mut config = CheckConfig::default();
        config.model_required_kinds = vec![ElementKind::Actor];
        config.construct_rules.clear();
        let report = check_all(&m, &config);
        let codes: Vec<Code> = report.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::C014, Code::X010, Code::A010]);
        assert!(!report.passed);
    }

    #[test]
    fn determinism_identical_inputs_identical_reports() {
        let src = "Package p { Goal g [ partOf g ] Actor a : User UserStory us [ asA ghost iWant \"several things\" ] }";
        let m = model_of(src);
        let config = CheckConfig::default();
        let a = check_all(&m, &config);
        let b = check_all(&m, &config);
        assert_eq!(a, b);
    }

    #[test]
    fn config_parsing_supports_comments_and_rejects_unknown_keys() {
        let config = parse_config(
            "// comment\n{\n  \"modelRequiredKinds\": [\"Actor\"], // trailing\n  \"strictness\": \"WarningsAsErrors\"\n}",
        )
        .unwrap();
        assert_eq!(config.model_required_kinds, vec![ElementKind::Actor]);
        assert_eq!(config.strictness, Strictness::WarningsAsErrors);

        assert!(parse_config("{\"bogus\": 1}").is_err());
        assert!(parse_config("{\"modelRequiredKinds\": [\"Banana\"]}").is_err());
    }

    #[test]
    fn report_json_is_stable() {
        let m = model_of("Package p { UseCase u : Other [ actorInitiates ghost ] }");
        let report = check_all(&m, &CheckConfig::empty());
        let a = serde_json::to_string(&report_to_json(&report)).unwrap();
        let b = serde_json::to_string(&report_to_json(&report)).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("{\"passed\":false,\"counts\":{\"errors\":1,"));
    }
}

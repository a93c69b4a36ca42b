//! Document automation: tagged templates rendered over a model.
//!
//! Tag language: `{{path}}` substitutes a value, `{{#each <name>}}...
//! {{/each}}` iterates (element kinds at the top level, collection
//! attributes inside an element, `steps` inside a scenario), `{{#if
//! <field>}}...{{/if}}` guards on presence, and `{{style:<id>}}` renders
//! the current element through a named linguistic style. Rendering is
//! total: every tag either expands or raises a documented error — an
//! unknown path is `RSL-T030`, never silently empty.

use crate::diag::{Code, Diagnostic};
use crate::model::*;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Text(String),
    Var(String),
    StyleRef(String),
    Each(String, Vec<Node>),
    If(String, Vec<Node>),
}

/// A parsed document template.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentTemplate {
    nodes: Vec<Node>,
}

fn err(code: Code, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(code, None, message)
}

/// Parses template text; tags must be balanced and well nested
/// (`RSL-T032` otherwise). CRLF input is normalized to LF.
pub fn parse_template(text: &str) -> Result<DocumentTemplate, Diagnostic> {
    let text = text.replace("\r\n", "\n");
    // Stack of (opening tag, body built so far); the bottom is the root.
    let mut stack: Vec<(Option<String>, Vec<Node>)> = vec![(None, Vec::new())];
    let mut rest = text.as_str();

    while let Some(start) = rest.find("{{") {
        if !rest[..start].is_empty() {
            stack.last_mut().unwrap().1.push(Node::Text(rest[..start].to_string()));
        }
        let after = &rest[start + 2..];
        let end = after
            .find("}}")
            .ok_or_else(|| err(Code::T032, "unclosed '{{' tag".to_string()))?;
        let tag = after[..end].trim().to_string();
        rest = &after[end + 2..];

        if let Some(name) = tag.strip_prefix("#each") {
            let name = name.trim();
            if name.is_empty() {
                return Err(err(Code::T032, "'#each' tag is missing a name"));
            }
            stack.push((Some(format!("each {name}")), Vec::new()));
        } else if let Some(field) = tag.strip_prefix("#if") {
            let field = field.trim();
            if field.is_empty() {
                return Err(err(Code::T032, "'#if' tag is missing a field"));
            }
            stack.push((Some(format!("if {field}")), Vec::new()));
        } else if tag == "/each" || tag == "/if" {
            let (opener, body) = stack
                .pop()
                .filter(|(opener, _)| opener.is_some())
                .ok_or_else(|| err(Code::T032, format!("'{{{{{tag}}}}}' without an open block")))?;
            let opener = opener.unwrap();
            let node = match (tag.as_str(), opener.split_once(' ')) {
                ("/each", Some(("each", name))) => Node::Each(name.to_string(), body),
                ("/if", Some(("if", field))) => Node::If(field.to_string(), body),
                _ => {
                    return Err(err(
                        Code::T032,
                        format!("'{{{{{tag}}}}}' does not match the open '{opener}' block"),
                    ))
                }
            };
            stack.last_mut().unwrap().1.push(node);
        } else if let Some(style) = tag.strip_prefix("style:") {
            stack.last_mut().unwrap().1.push(Node::StyleRef(style.trim().to_string()));
        } else {
            stack.last_mut().unwrap().1.push(Node::Var(tag));
        }
    }
    if !rest.is_empty() {
        stack.last_mut().unwrap().1.push(Node::Text(rest.to_string()));
    }
    if stack.len() != 1 {
        let open = stack.last().and_then(|(o, _)| o.clone()).unwrap_or_default();
        return Err(err(Code::T032, format!("unclosed '{open}' block")));
    }
    Ok(DocumentTemplate { nodes: stack.pop().unwrap().1 })
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
enum Scope<'a> {
    Model(&'a SpecificationModel),
    Element(&'a Element),
    Scenario(&'a Scenario),
    Step(&'a Step),
    Attribute(&'a DataAttribute),
    Text(&'a str),
}

enum Resolved<'a> {
    Value(String),
    Absent,
    Elements(Vec<&'a Element>),
    Scenarios(&'a [Scenario]),
    Steps(&'a [Step]),
    Attributes(&'a [DataAttribute]),
    Texts(Vec<&'a str>),
}

fn resolve<'a>(scope: Scope<'a>, model: &'a SpecificationModel, path: &str) -> Option<Resolved<'a>> {
    fn opt(o: &Option<String>) -> Resolved<'_> {
        match o {
            Some(v) => Resolved::Value(v.clone()),
            None => Resolved::Absent,
        }
    }
    fn opt_ident(o: &Option<Ident>) -> Resolved<'_> {
        match o {
            Some(v) => Resolved::Value(v.to_string()),
            None => Resolved::Absent,
        }
    }
    Some(match scope {
        Scope::Model(m) => match path {
            "package" => Resolved::Value(m.package_name.to_string()),
            kind => {
                let kind: ElementKind = kind.parse().ok()?;
                Resolved::Elements(m.elements_of(kind).collect())
            }
        },
        Scope::Element(e) => match (path, &e.body) {
            ("id", _) => Resolved::Value(e.id.to_string()),
            ("name", _) => opt(&e.name),
            ("description", _) | ("definition", _) => opt(&e.description),
            ("kind", ElementBody::Actor(a)) => Resolved::Value(a.kind.to_string()),
            ("kind", ElementBody::DataEntity(d)) => Resolved::Value(d.kind.to_string()),
            ("kind", ElementBody::UseCase(u)) => Resolved::Value(u.kind.to_string()),
            ("kind", ElementBody::QualityRequirement(q)) => Resolved::Value(q.kind.to_string()),
            ("attributes", ElementBody::DataEntity(d)) => Resolved::Attributes(&d.attributes),
            ("primary_actor", ElementBody::UseCase(u)) => opt_ident(&u.primary_actor),
            ("data_entities", ElementBody::UseCase(u)) => {
                Resolved::Texts(u.data_entities.iter().map(|i| i.as_str()).collect())
            }
            ("scenarios", ElementBody::UseCase(u)) => Resolved::Scenarios(&u.scenarios),
            ("as_a", ElementBody::UserStory(s)) => Resolved::Value(s.as_a.to_string()),
            ("i_want", ElementBody::UserStory(s)) => Resolved::Value(s.i_want.clone()),
            ("so_that", ElementBody::UserStory(s)) => opt(&s.so_that),
            ("priority", ElementBody::UserStory(s)) => priority(s.priority),
            ("parent", ElementBody::Goal(g)) => opt_ident(&g.parent),
            ("priority", ElementBody::Goal(g)) => priority(g.priority),
            ("metric", ElementBody::QualityRequirement(q)) => opt(&q.metric),
            ("target_value", ElementBody::QualityRequirement(q)) => opt(&q.target_value),
            ("traces_to", ElementBody::TestCase(t)) => Resolved::Value(t.traces_to.to_string()),
            ("scenario", ElementBody::TestCase(t)) => opt_ident(&t.scenario),
            ("given", ElementBody::TestCase(t)) => {
                Resolved::Texts(t.given.iter().map(String::as_str).collect())
            }
            ("when", ElementBody::TestCase(t)) => {
                Resolved::Texts(t.when.iter().map(String::as_str).collect())
            }
            ("then", ElementBody::TestCase(t)) => {
                Resolved::Texts(t.then.iter().map(String::as_str).collect())
            }
            ("term", ElementBody::GlossaryTerm(t)) => Resolved::Value(t.term.clone()),
            ("part_of_speech", ElementBody::GlossaryTerm(t)) => {
                Resolved::Value(t.part_of_speech.to_string())
            }
            ("synonyms", ElementBody::GlossaryTerm(t)) => {
                Resolved::Texts(t.synonyms.iter().map(String::as_str).collect())
            }
            ("preferred", ElementBody::GlossaryTerm(t)) => {
                Resolved::Value(t.preferred.to_string())
            }
            ("package", _) => Resolved::Value(model.package_name.to_string()),
            _ => return None,
        },
        Scope::Scenario(s) => match path {
            "id" => Resolved::Value(s.id.to_string()),
            "kind" => Resolved::Value(s.kind.to_string()),
            "steps" => Resolved::Steps(&s.steps),
            _ => return None,
        },
        Scope::Step(s) => match path {
            "order" => Resolved::Value(s.order.to_string()),
            "performer" => Resolved::Value(s.performer.to_string()),
            "action" => Resolved::Value(s.action.clone()),
            _ => return None,
        },
        Scope::Attribute(a) => match path {
            "name" => Resolved::Value(a.name.to_string()),
            "datatype" => Resolved::Value(a.datatype.to_string()),
            "constraints" => Resolved::Value(
                a.constraints.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" "),
            ),
            "references" => opt_ident(&a.references),
            _ => return None,
        },
        Scope::Text(t) => match path {
            "this" => Resolved::Value(t.to_string()),
            _ => return None,
        },
    })
}

fn priority(p: Priority) -> Resolved<'static> {
    if p == Priority::Unset {
        Resolved::Absent
    } else {
        Resolved::Value(p.to_string())
    }
}

struct Renderer<'a> {
    model: &'a SpecificationModel,
    styles: &'a [LinguisticStyle],
}

impl<'a> Renderer<'a> {
    fn render_nodes(
        &self,
        nodes: &[Node],
        scope: Scope<'a>,
        out: &mut String,
    ) -> Result<(), Diagnostic> {
        for node in nodes {
            match node {
                Node::Text(text) => out.push_str(text),
                Node::Var(path) => match resolve(scope, self.model, path) {
                    Some(Resolved::Value(v)) => out.push_str(&v),
                    Some(Resolved::Absent) => {}
                    Some(_) => {
                        return Err(err(
                            Code::T030,
                            format!("'{path}' is a collection; iterate it with '#each'"),
                        ))
                    }
                    None => return Err(err(Code::T030, format!("unknown path '{path}'"))),
                },
                Node::If(field, body) => {
                    let truthy = match resolve(scope, self.model, field) {
                        Some(Resolved::Value(v)) => !v.is_empty() && v != "false",
                        Some(Resolved::Absent) => false,
                        Some(Resolved::Elements(e)) => !e.is_empty(),
                        Some(Resolved::Scenarios(s)) => !s.is_empty(),
                        Some(Resolved::Steps(s)) => !s.is_empty(),
                        Some(Resolved::Attributes(a)) => !a.is_empty(),
                        Some(Resolved::Texts(t)) => !t.is_empty(),
                        None => return Err(err(Code::T030, format!("unknown path '{field}'"))),
                    };
                    if truthy {
                        self.render_nodes(body, scope, out)?;
                    }
                }
                Node::Each(name, body) => match resolve(scope, self.model, name) {
                    Some(Resolved::Elements(elements)) => {
                        for element in elements {
                            self.render_nodes(body, Scope::Element(element), out)?;
                        }
                    }
                    Some(Resolved::Scenarios(scenarios)) => {
                        for scenario in scenarios {
                            self.render_nodes(body, Scope::Scenario(scenario), out)?;
                        }
                    }
                    Some(Resolved::Steps(steps)) => {
                        for step in steps {
                            self.render_nodes(body, Scope::Step(step), out)?;
                        }
                    }
                    Some(Resolved::Attributes(attrs)) => {
                        for attr in attrs {
                            self.render_nodes(body, Scope::Attribute(attr), out)?;
                        }
                    }
                    Some(Resolved::Texts(texts)) => {
                        for text in texts {
                            self.render_nodes(body, Scope::Text(text), out)?;
                        }
                    }
                    Some(_) => {
                        return Err(err(
                            Code::T030,
                            format!("'{name}' is a single value, not a collection"),
                        ))
                    }
                    None => return Err(err(Code::T030, format!("unknown path '{name}'"))),
                },
                Node::StyleRef(style_id) => {
                    let element = match scope {
                        Scope::Element(e) => e,
                        _ => {
                            return Err(err(
                                Code::T031,
                                format!("style '{style_id}' used outside an element context"),
                            ))
                        }
                    };
                    let style = self
                        .styles
                        .iter()
                        .find(|s| s.style_id.as_str() == style_id)
                        .ok_or_else(|| err(Code::T031, format!("unknown style '{style_id}'")))?;
                    if style.pattern != element.kind() {
                        return Err(err(
                            Code::T031,
                            format!(
                                "style '{style_id}' renders {} but the current element is a {}",
                                style.pattern,
                                element.kind()
                            ),
                        ));
                    }
                    out.push_str(&self.render_style(style, element)?);
                }
            }
        }
        Ok(())
    }

    /// Substitutes the `{{attr}}` placeholders of a style; absent optional
    /// attributes render empty.
    fn render_style(&self, style: &LinguisticStyle, element: &Element) -> Result<String, Diagnostic> {
        let mut out = String::new();
        let mut rest = style.template.as_str();
        while let Some(start) = rest.find("{{") {
            out.push_str(&rest[..start]);
            let after = &rest[start + 2..];
            let Some(end) = after.find("}}") else {
                out.push_str(&rest[start..]);
                break;
            };
            let attr = after[..end].trim();
            match resolve(Scope::Element(element), self.model, attr) {
                Some(Resolved::Value(v)) => out.push_str(&v),
                Some(Resolved::Absent) => {}
                _ => {
                    return Err(err(
                        Code::T030,
                        format!("style '{}': unknown attribute '{attr}'", style.style_id),
                    ))
                }
            }
            rest = &after[end + 2..];
        }
        out.push_str(rest);
        Ok(out)
    }
}

/// Expands a template over a model. Deterministic; errors are `RSL-T030`
/// (unknown path), `RSL-T031` (style problems) — tag balance was already
/// settled at parse time.
pub fn render_document(
    model: &SpecificationModel,
    template: &DocumentTemplate,
    styles: &[LinguisticStyle],
) -> Result<String, Diagnostic> {
    let renderer = Renderer { model, styles };
    let mut out = String::new();
    renderer.render_nodes(&template.nodes, Scope::Model(model), &mut out)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Style files
// ---------------------------------------------------------------------------

/// Parses a `.styles` file: blocks separated by blank lines, each opened
/// by `style <id> for <Kind>:` with the template on the following lines.
pub fn parse_styles(text: &str) -> Result<Vec<LinguisticStyle>, Diagnostic> {
    let text = text.replace("\r\n", "\n");
    let mut styles = Vec::new();
    let mut lines = text.lines().peekable();
    while let Some(line) = lines.next() {
        if line.trim().is_empty() {
            continue;
        }
        let header = line.trim();
        let rest = header
            .strip_prefix("style ")
            .and_then(|r| r.strip_suffix(':'))
            .ok_or_else(|| {
                err(Code::T033, format!("expected 'style <id> for <Kind>:', found '{header}'"))
            })?;
        let (id, kind) = rest
            .split_once(" for ")
            .ok_or_else(|| err(Code::T033, format!("missing 'for <Kind>' in '{header}'")))?;
        let style_id = Ident::new(id.trim())
            .map_err(|e| err(Code::T033, format!("style id: {e}")))?;
        let kind: ElementKind = kind
            .trim()
            .parse()
            .map_err(|e: ModelError| err(Code::T033, e.to_string()))?;
        let mut body = Vec::new();
        while let Some(next) = lines.peek() {
            if next.trim().is_empty() {
                break;
            }
            body.push(lines.next().unwrap());
        }
        if body.is_empty() {
            return Err(err(Code::T033, format!("style '{style_id}' has an empty template")));
        }
        let style = LinguisticStyle::new(style_id, kind, body.join("\n"))
            .map_err(|e| err(Code::T033, e.to_string()))?;
        styles.push(style);
    }
    Ok(styles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn model() -> SpecificationModel {
        parse(
            r#"Package shop {
    Actor a_Customer "Customer" : User
    UserStory us_1 [
        asA a_Customer
        iWant "to track my order"
        soThat "I know the delivery date"
    ]
    UseCase uc_1 : EntityBrowse [
        actorInitiates a_Customer
        scenario s1 : Main [
            step 1 : Actor "asks"
            step 2 : System "answers"
        ]
    ]
}"#,
            "t.rsl",
        )
        .model
        .unwrap()
    }

    fn story_style() -> LinguisticStyle {
        LinguisticStyle::new(
            Ident::new("story_sentence").unwrap(),
            ElementKind::UserStory,
            "As a {{as_a}}, I want {{i_want}} so that {{so_that}}.",
        )
        .unwrap()
    }

    #[test]
    fn package_substitution() {
        let t = parse_template("# {{package}}").unwrap();
        let out = render_document(&model(), &t, &[]).unwrap();
        assert_eq!(out, "# shop");
    }

    #[test]
    fn story_sentence_style_renders_by_direct_substitution() {
        let t = parse_template("{{#each UserStory}}{{style:story_sentence}}{{/each}}").unwrap();
        let out = render_document(&model(), &t, &[story_style()]).unwrap();
        assert_eq!(out, "As a a_Customer, I want to track my order so that I know the delivery date.");
    }

    #[test]
    fn nested_each_blocks_iterate_scenarios_and_steps() {
        let t = parse_template(
            "{{#each UseCase}}{{#each scenarios}}{{#each steps}}{{order}}:{{performer}} {{action}}\n{{/each}}{{/each}}{{/each}}",
        )
        .unwrap();
        let out = render_document(&model(), &t, &[]).unwrap();
        assert_eq!(out, "1:Actor asks\n2:System answers\n");
    }

    #[test]
    fn if_guards_presence() {
        let t = parse_template("{{#each Actor}}{{#if name}}[{{name}}]{{/if}}{{#if description}}D{{/if}}{{/each}}").unwrap();
        let out = render_document(&model(), &t, &[]).unwrap();
        assert_eq!(out, "[Customer]");
    }

    #[test]
    fn unknown_path_is_t030() {
        let t = parse_template("{{nonsense}}").unwrap();
        let e = render_document(&model(), &t, &[]).unwrap_err();
        assert_eq!(e.code, Code::T030);
    }

    #[test]
    fn unknown_style_is_t031() {
        let t = parse_template("{{#each UserStory}}{{style:ghost}}{{/each}}").unwrap();
        let e = render_document(&model(), &t, &[]).unwrap_err();
        assert_eq!(e.code, Code::T031);
    }

    #[test]
    fn unbalanced_tags_are_t032() {
        assert_eq!(parse_template("{{#each Actor}}").unwrap_err().code, Code::T032);
        assert_eq!(parse_template("{{/each}}").unwrap_err().code, Code::T032);
        assert_eq!(parse_template("{{#each Actor}}{{/if}}").unwrap_err().code, Code::T032);
        assert_eq!(parse_template("{{oops").unwrap_err().code, Code::T032);
    }

    #[test]
    fn style_file_round_trip() {
        let styles = parse_styles(
            "style story_sentence for UserStory:\nAs a {{as_a}}, I want {{i_want}} so that {{so_that}}.\n\nstyle actor_line for Actor:\n- {{id}} ({{kind}})\n",
        )
        .unwrap();
        assert_eq!(styles.len(), 2);
        assert_eq!(styles[0].style_id.as_str(), "story_sentence");
        assert_eq!(styles[1].pattern, ElementKind::Actor);

        let bad = parse_styles("style x for UserStory:\n{{bogus}}\n");
        assert_eq!(bad.unwrap_err().code, Code::T033);
    }
}

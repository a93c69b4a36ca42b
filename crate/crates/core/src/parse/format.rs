//! Canonical pretty-printer: the one textual style for whole models.
//!
//! Output is deterministic — LF line endings, 4-space indentation, one
//! element per block, attributes in metamodel order — and reparses to a
//! model structurally equal to the canonicalized input. Formatting an
//! already-formatted source is a byte-level fixed point.

use crate::model::*;

/// Renders the canonicalized model as `.rsl` source text.
pub fn format(model: &SpecificationModel) -> String {
    let model = model.canonicalized();
    let mut out = String::new();
    out.push_str(&format!("Package {} {{\n", model.package_name));
    for import in &model.imports {
        match &import.alias {
            Some(alias) => out.push_str(&format!("    Import {} as {}\n", import.target, alias)),
            None => out.push_str(&format!("    Import {}\n", import.target)),
        }
    }
    for element in &model.elements {
        write_element(&mut out, element);
    }
    out.push_str("}\n");
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn header(keyword: &str, element: &Element) -> String {
    match &element.name {
        Some(name) => format!("{keyword} {} {}", element.id, quote(name)),
        None => format!("{keyword} {}", element.id),
    }
}

/// Emits `head [body...]`; with no body lines, required brackets collapse
/// to `[]` and optional brackets disappear.
fn write_block(out: &mut String, head: String, body: Vec<String>, brackets_required: bool) {
    indent(out, 1);
    out.push_str(&head);
    if body.is_empty() {
        if brackets_required {
            out.push_str(" []");
        }
        out.push('\n');
        return;
    }
    out.push_str(" [\n");
    for line in body {
        out.push_str(&line);
    }
    indent(out, 1);
    out.push_str("]\n");
}

fn line(level: usize, text: String) -> String {
    let mut s = String::new();
    for _ in 0..level {
        s.push_str("    ");
    }
    s.push_str(&text);
    s.push('\n');
    s
}

fn description_line(element: &Element) -> Option<String> {
    element.description.as_ref().map(|d| line(2, format!("description {}", quote(d))))
}

fn write_element(out: &mut String, element: &Element) {
    match &element.body {
        ElementBody::Actor(a) => {
            let head = format!("{} : {}", header("Actor", element), a.kind);
            let body: Vec<String> = description_line(element).into_iter().collect();
            write_block(out, head, body, false);
        }
        ElementBody::DataEntity(entity) => {
            let head = format!("{} : {}", header("DataEntity", element), entity.kind);
            let mut body: Vec<String> = description_line(element).into_iter().collect();
            for attr in &entity.attributes {
                let mut text = format!("attribute {} : {}", attr.name, attr.datatype);
                if !attr.constraints.is_empty() {
                    let names: Vec<&str> = attr.constraints.iter().map(|c| c.as_str()).collect();
                    text.push_str(&format!(" constraints ({})", names.join(" ")));
                }
                if let Some(target) = &attr.references {
                    text.push_str(&format!(" references {target}"));
                }
                body.push(line(2, text));
            }
            write_block(out, head, body, true);
        }
        ElementBody::UseCase(uc) => {
            let head = format!("{} : {}", header("UseCase", element), uc.kind);
            let mut body: Vec<String> = description_line(element).into_iter().collect();
            if let Some(actor) = &uc.primary_actor {
                body.push(line(2, format!("actorInitiates {actor}")));
            }
            if !uc.data_entities.is_empty() {
                let ids: Vec<&str> = uc.data_entities.iter().map(|e| e.as_str()).collect();
                body.push(line(2, format!("dataEntity {}", ids.join(", "))));
            }
            for scenario in &uc.scenarios {
                if scenario.steps.is_empty() {
                    body.push(line(2, format!("scenario {} : {} []", scenario.id, scenario.kind)));
                    continue;
                }
                body.push(line(2, format!("scenario {} : {} [", scenario.id, scenario.kind)));
                for step in &scenario.steps {
                    body.push(line(
                        3,
                        format!("step {} : {} {}", step.order, step.performer, quote(&step.action)),
                    ));
                }
                body.push(line(2, "]".to_string()));
            }
            write_block(out, head, body, true);
        }
        ElementBody::UserStory(story) => {
            let head = header("UserStory", element);
            let mut body: Vec<String> = description_line(element).into_iter().collect();
            body.push(line(2, format!("asA {}", story.as_a)));
            body.push(line(2, format!("iWant {}", quote(&story.i_want))));
            if let Some(so_that) = &story.so_that {
                body.push(line(2, format!("soThat {}", quote(so_that))));
            }
            if story.priority != Priority::Unset {
                body.push(line(2, format!("priority {}", story.priority)));
            }
            write_block(out, head, body, true);
        }
        ElementBody::Goal(goal) => {
            let head = header("Goal", element);
            let mut body: Vec<String> = description_line(element).into_iter().collect();
            if let Some(parent) = &goal.parent {
                body.push(line(2, format!("partOf {parent}")));
            }
            if goal.priority != Priority::Unset {
                body.push(line(2, format!("priority {}", goal.priority)));
            }
            write_block(out, head, body, false);
        }
        ElementBody::QualityRequirement(qr) => {
            let head = format!("{} : {}", header("QR", element), qr.kind);
            let mut body: Vec<String> = description_line(element).into_iter().collect();
            if let Some(metric) = &qr.metric {
                body.push(line(2, format!("metric {}", quote(metric))));
            }
            if let Some(value) = &qr.target_value {
                body.push(line(2, format!("value {}", quote(value))));
            }
            write_block(out, head, body, false);
        }
        ElementBody::TestCase(tc) => {
            let head = header("TestCase", element);
            let mut body: Vec<String> = description_line(element).into_iter().collect();
            let mut traces = format!("traces {}", tc.traces_to);
            if let Some(scenario) = &tc.scenario {
                traces.push_str(&format!(" scenario {scenario}"));
            }
            body.push(line(2, traces));
            for g in &tc.given {
                body.push(line(2, format!("given {}", quote(g))));
            }
            for w in &tc.when {
                body.push(line(2, format!("when {}", quote(w))));
            }
            for t in &tc.then {
                body.push(line(2, format!("then {}", quote(t))));
            }
            write_block(out, head, body, true);
        }
        ElementBody::GlossaryTerm(term) => {
            let head = format!("Term {} : {}", quote(&term.term), term.part_of_speech);
            let mut body = Vec::new();
            if let Some(definition) = &element.description {
                body.push(line(2, format!("definition {}", quote(definition))));
            }
            for synonym in &term.synonyms {
                body.push(line(2, format!("synonym {}", quote(synonym))));
            }
            if !term.preferred {
                body.push(line(2, "notPreferred".to_string()));
            }
            write_block(out, head, body, false);
        }
    }
}

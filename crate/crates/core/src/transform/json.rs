//! Canonical JSON interchange.
//!
//! Export emits one fixed shape: top-level keys `schemaVersion`, `package`,
//! `imports`, `elements` in that order, element keys in the documented
//! per-kind order, arrays always present, optional scalars omitted, no
//! source spans. Two exports of the same model are byte-identical.
//! Import is the exact inverse and rejects what it does not know:
//! unknown fields (`RSL-T010`), wrong schema version (`RSL-T011`),
//! anything structurally off (`RSL-T012`).

use serde_json::{json, Map, Value};

use crate::diag::{Code, Diagnostic};
use crate::model::*;

pub const SCHEMA_VERSION: &str = "1";

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Serializes the model as compact canonical JSON.
pub fn export_json(model: &SpecificationModel) -> String {
    serde_json::to_string(&model_to_value(model)).expect("value serialization cannot fail")
}

fn model_to_value(model: &SpecificationModel) -> Value {
    let imports: Vec<Value> = model
        .imports
        .iter()
        .map(|i| {
            let mut obj = Map::new();
            obj.insert("target".into(), json!(i.target.to_string()));
            if let Some(alias) = &i.alias {
                obj.insert("alias".into(), json!(alias));
            }
            Value::Object(obj)
        })
        .collect();
    json!({
        "schemaVersion": SCHEMA_VERSION,
        "package": model.package_name.to_string(),
        "imports": imports,
        "elements": model.elements.iter().map(element_to_value).collect::<Vec<_>>(),
    })
}

fn push_common(obj: &mut Map<String, Value>, element: &Element) {
    obj.insert("kind".into(), json!(element.kind().as_str()));
    obj.insert("id".into(), json!(element.id.as_str()));
    if let Some(name) = &element.name {
        obj.insert("name".into(), json!(name));
    }
    if let Some(description) = &element.description {
        obj.insert("description".into(), json!(description));
    }
}

fn element_to_value(element: &Element) -> Value {
    let mut obj = Map::new();
    match &element.body {
        ElementBody::Actor(a) => {
            push_common(&mut obj, element);
            obj.insert("actorKind".into(), json!(a.kind.as_str()));
        }
        ElementBody::DataEntity(entity) => {
            push_common(&mut obj, element);
            obj.insert("entityKind".into(), json!(entity.kind.as_str()));
            let attrs: Vec<Value> = entity
                .attributes
                .iter()
                .map(|attr| {
                    let mut a = Map::new();
                    a.insert("name".into(), json!(attr.name.as_str()));
                    a.insert("datatype".into(), json!(attr.datatype.as_str()));
                    a.insert(
                        "constraints".into(),
                        json!(attr.constraints.iter().map(|c| c.as_str()).collect::<Vec<_>>()),
                    );
                    if let Some(target) = &attr.references {
                        a.insert("references".into(), json!(target.as_str()));
                    }
                    Value::Object(a)
                })
                .collect();
            obj.insert("attributes".into(), Value::Array(attrs));
        }
        ElementBody::UseCase(uc) => {
            push_common(&mut obj, element);
            obj.insert("useCaseKind".into(), json!(uc.kind.as_str()));
            if let Some(actor) = &uc.primary_actor {
                obj.insert("primaryActor".into(), json!(actor.as_str()));
            }
            obj.insert(
                "dataEntities".into(),
                json!(uc.data_entities.iter().map(|e| e.as_str()).collect::<Vec<_>>()),
            );
            let scenarios: Vec<Value> = uc
                .scenarios
                .iter()
                .map(|s| {
                    let steps: Vec<Value> = s
                        .steps
                        .iter()
                        .map(|step| {
                            json!({
                                "order": step.order,
                                "performer": step.performer.as_str(),
                                "action": step.action,
                            })
                        })
                        .collect();
                    json!({
                        "id": s.id.as_str(),
                        "kind": s.kind.as_str(),
                        "steps": steps,
                    })
                })
                .collect();
            obj.insert("scenarios".into(), Value::Array(scenarios));
        }
        ElementBody::UserStory(story) => {
            push_common(&mut obj, element);
            obj.insert("asA".into(), json!(story.as_a.as_str()));
            obj.insert("iWant".into(), json!(story.i_want));
            if let Some(so_that) = &story.so_that {
                obj.insert("soThat".into(), json!(so_that));
            }
            if story.priority != Priority::Unset {
                obj.insert("priority".into(), json!(story.priority.as_str()));
            }
        }
        ElementBody::Goal(goal) => {
            push_common(&mut obj, element);
            if let Some(parent) = &goal.parent {
                obj.insert("parent".into(), json!(parent.as_str()));
            }
            if goal.priority != Priority::Unset {
                obj.insert("priority".into(), json!(goal.priority.as_str()));
            }
        }
        ElementBody::QualityRequirement(qr) => {
            push_common(&mut obj, element);
            obj.insert("qrKind".into(), json!(qr.kind.as_str()));
            if let Some(metric) = &qr.metric {
                obj.insert("metric".into(), json!(metric));
            }
            if let Some(value) = &qr.target_value {
                obj.insert("targetValue".into(), json!(value));
            }
        }
        ElementBody::TestCase(tc) => {
            push_common(&mut obj, element);
            obj.insert("traces".into(), json!(tc.traces_to.as_str()));
            if let Some(scenario) = &tc.scenario {
                obj.insert("scenario".into(), json!(scenario.as_str()));
            }
            obj.insert("given".into(), json!(tc.given));
            obj.insert("when".into(), json!(tc.when));
            obj.insert("then".into(), json!(tc.then));
        }
        ElementBody::GlossaryTerm(term) => {
            // Glossary ids are derived from the term, so none is emitted;
            // the definition doubles as the description.
            obj.insert("kind".into(), json!("GlossaryTerm"));
            obj.insert("term".into(), json!(term.term));
            obj.insert("partOfSpeech".into(), json!(term.part_of_speech.as_str()));
            if let Some(definition) = &element.description {
                obj.insert("definition".into(), json!(definition));
            }
            obj.insert("synonyms".into(), json!(term.synonyms));
            obj.insert("preferred".into(), json!(term.preferred));
        }
    }
    Value::Object(obj)
}

// ---------------------------------------------------------------------------
// Import
// ---------------------------------------------------------------------------

struct Reader {
    diagnostics: Vec<Diagnostic>,
}

type Import<T> = Result<T, ()>;

impl Reader {
    fn fail(&mut self, code: Code, message: impl Into<String>) -> () {
        self.diagnostics.push(Diagnostic::new(code, None, message));
    }

    fn object<'v>(&mut self, v: &'v Value, context: &str) -> Import<&'v Map<String, Value>> {
        v.as_object().ok_or_else(|| self.fail(Code::T012, format!("{context} must be an object")))
    }

    fn array<'v>(&mut self, v: &'v Value, context: &str) -> Import<&'v Vec<Value>> {
        v.as_array().ok_or_else(|| self.fail(Code::T012, format!("{context} must be an array")))
    }

    fn string(&mut self, v: &Value, context: &str) -> Import<String> {
        v.as_str()
            .map(str::to_string)
            .ok_or_else(|| self.fail(Code::T012, format!("{context} must be a string")))
    }

    fn required<'v>(
        &mut self,
        obj: &'v Map<String, Value>,
        key: &str,
        context: &str,
    ) -> Import<&'v Value> {
        obj.get(key)
            .ok_or_else(|| self.fail(Code::T012, format!("{context} is missing key '{key}'")))
    }

    fn check_keys(
        &mut self,
        obj: &Map<String, Value>,
        allowed: &[&str],
        context: &str,
    ) -> Import<()> {
        let mut ok = Ok(());
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                ok = Err(self.fail(Code::T010, format!("unknown field '{key}' in {context}")));
            }
        }
        ok
    }

    fn ident(&mut self, v: &Value, context: &str) -> Import<Ident> {
        let s = self.string(v, context)?;
        Ident::new(s).map_err(|e| self.fail(Code::T012, format!("{context}: {e}")))
    }

    fn vocab<T: std::str::FromStr<Err = ModelError>>(
        &mut self,
        v: &Value,
        context: &str,
    ) -> Import<T> {
        let s = self.string(v, context)?;
        s.parse::<T>().map_err(|e| self.fail(Code::T012, format!("{context}: {e}")))
    }

    fn string_list(&mut self, v: &Value, context: &str) -> Import<Vec<String>> {
        let arr = self.array(v, context)?;
        arr.iter().map(|e| self.string(e, context)).collect()
    }
}

/// Parses a canonical JSON document back into a model. Structural errors
/// are reported exhaustively where possible; any error suppresses the
/// model.
pub fn import_json(text: &str) -> Result<SpecificationModel, Vec<Diagnostic>> {
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            return Err(vec![Diagnostic::new(
                Code::T012,
                None,
                format!("malformed JSON document: {e}"),
            )])
        }
    };
    let mut r = Reader { diagnostics: Vec::new() };
    let model = read_model(&mut r, &value);
    match model {
        Ok(m) if r.diagnostics.is_empty() => Ok(m),
        _ => Err(r.diagnostics),
    }
}

fn read_model(r: &mut Reader, value: &Value) -> Import<SpecificationModel> {
    let obj = r.object(value, "document")?;
    r.check_keys(obj, &["schemaVersion", "package", "imports", "elements"], "document")?;

    let version = r.string(r.required(obj, "schemaVersion", "document")?, "schemaVersion")?;
    if version != SCHEMA_VERSION {
        r.fail(
            Code::T011,
            format!("unsupported schema version '{version}' (supported: {SCHEMA_VERSION})"),
        );
        return Err(());
    }

    let package = r.string(r.required(obj, "package", "document")?, "package")?;
    let package = QualifiedName::parse(&package)
        .map_err(|e| r.fail(Code::T012, format!("package: {e}")))?;
    let mut model = SpecificationModel::new(package);

    for (index, import) in r
        .array(r.required(obj, "imports", "document")?, "imports")?
        .clone()
        .iter()
        .enumerate()
    {
        let context = format!("imports[{index}]");
        let iobj = r.object(import, &context)?;
        r.check_keys(iobj, &["target", "alias"], &context)?;
        let target = r.string(r.required(iobj, "target", &context)?, "target")?;
        let target = QualifiedName::parse(&target)
            .map_err(|e| r.fail(Code::T012, format!("{context}: {e}")))?;
        let alias = match iobj.get("alias") {
            Some(a) => Some(r.string(a, "alias")?),
            None => None,
        };
        let decl = ImportDecl::new(target, alias)
            .map_err(|e| r.fail(Code::T012, format!("{context}: {e}")))?;
        model.add_import(decl).map_err(|e| r.fail(Code::T012, format!("{context}: {e}")))?;
    }

    for (index, element) in r
        .array(r.required(obj, "elements", "document")?, "elements")?
        .clone()
        .iter()
        .enumerate()
    {
        let context = format!("elements[{index}]");
        if let Ok(e) = read_element(r, element, &context) {
            if let Err(d) = model.push_element(e) {
                r.diagnostics.push(d);
            }
        }
    }
    Ok(model)
}

fn read_common(
    r: &mut Reader,
    obj: &Map<String, Value>,
    context: &str,
) -> Import<(Ident, Option<String>, Option<String>)> {
    let id = r.ident(r.required(obj, "id", context)?, "id")?;
    let name = match obj.get("name") {
        Some(v) => Some(r.string(v, "name")?),
        None => None,
    };
    let description = match obj.get("description") {
        Some(v) => Some(r.string(v, "description")?),
        None => None,
    };
    Ok((id, name, description))
}

fn apply_common(element: Element, name: Option<String>, description: Option<String>) -> Element {
    let element = match name {
        Some(n) => element.with_name(n),
        None => element,
    };
    match description {
        Some(d) => element.with_description(d),
        None => element,
    }
}

fn read_priority(r: &mut Reader, obj: &Map<String, Value>) -> Import<Priority> {
    match obj.get("priority") {
        Some(v) => r.vocab(v, "priority"),
        None => Ok(Priority::Unset),
    }
}

fn read_element(r: &mut Reader, value: &Value, context: &str) -> Import<Element> {
    let obj = r.object(value, context)?;
    let kind = r.string(r.required(obj, "kind", context)?, "kind")?;
    match kind.as_str() {
        "Actor" => {
            r.check_keys(obj, &["kind", "id", "name", "description", "actorKind"], context)?;
            let (id, name, description) = read_common(r, obj, context)?;
            let actor_kind: ActorKind = r.vocab(r.required(obj, "actorKind", context)?, "actorKind")?;
            Ok(apply_common(
                Element::new(id, ElementBody::Actor(Actor { kind: actor_kind })),
                name,
                description,
            ))
        }
        "DataEntity" => {
            r.check_keys(
                obj,
                &["kind", "id", "name", "description", "entityKind", "attributes"],
                context,
            )?;
            let (id, name, description) = read_common(r, obj, context)?;
            let entity_kind: EntityKind =
                r.vocab(r.required(obj, "entityKind", context)?, "entityKind")?;
            let mut attributes = Vec::new();
            for (i, attr) in r
                .array(r.required(obj, "attributes", context)?, "attributes")?
                .clone()
                .iter()
                .enumerate()
            {
                let actx = format!("{context}.attributes[{i}]");
                let aobj = r.object(attr, &actx)?;
                r.check_keys(aobj, &["name", "datatype", "constraints", "references"], &actx)?;
                let aname = r.ident(r.required(aobj, "name", &actx)?, "attribute name")?;
                let datatype: DataType = r.vocab(r.required(aobj, "datatype", &actx)?, "datatype")?;
                let mut constraints = Vec::new();
                for c in r.array(r.required(aobj, "constraints", &actx)?, "constraints")?.clone() {
                    constraints.push(r.vocab::<AttrConstraint>(&c, "constraint")?);
                }
                let references = match aobj.get("references") {
                    Some(v) => Some(r.ident(v, "references")?),
                    None => None,
                };
                attributes.push(DataAttribute::new(aname, datatype, constraints, references));
            }
            Ok(apply_common(
                Element::new(id, ElementBody::DataEntity(DataEntity { kind: entity_kind, attributes })),
                name,
                description,
            ))
        }
        "UseCase" => {
            r.check_keys(
                obj,
                &[
                    "kind",
                    "id",
                    "name",
                    "description",
                    "useCaseKind",
                    "primaryActor",
                    "dataEntities",
                    "scenarios",
                ],
                context,
            )?;
            let (id, name, description) = read_common(r, obj, context)?;
            let uc_kind: UseCaseKind =
                r.vocab(r.required(obj, "useCaseKind", context)?, "useCaseKind")?;
            let primary_actor = match obj.get("primaryActor") {
                Some(v) => Some(r.ident(v, "primaryActor")?),
                None => None,
            };
            let mut data_entities = Vec::new();
            for v in r.array(r.required(obj, "dataEntities", context)?, "dataEntities")?.clone() {
                data_entities.push(r.ident(&v, "dataEntities entry")?);
            }
            let mut scenarios = Vec::new();
            for (i, s) in r
                .array(r.required(obj, "scenarios", context)?, "scenarios")?
                .clone()
                .iter()
                .enumerate()
            {
                let sctx = format!("{context}.scenarios[{i}]");
                let sobj = r.object(s, &sctx)?;
                r.check_keys(sobj, &["id", "kind", "steps"], &sctx)?;
                let sid = r.ident(r.required(sobj, "id", &sctx)?, "scenario id")?;
                let skind: ScenarioKind = r.vocab(r.required(sobj, "kind", &sctx)?, "scenario kind")?;
                let mut steps = Vec::new();
                for (j, step) in
                    r.array(r.required(sobj, "steps", &sctx)?, "steps")?.clone().iter().enumerate()
                {
                    let stctx = format!("{sctx}.steps[{j}]");
                    let stobj = r.object(step, &stctx)?;
                    r.check_keys(stobj, &["order", "performer", "action"], &stctx)?;
                    let order = r
                        .required(stobj, "order", &stctx)?
                        .as_u64()
                        .and_then(|n| u32::try_from(n).ok())
                        .ok_or_else(|| {
                            r.fail(Code::T012, format!("{stctx}: order must be a positive integer"))
                        })?;
                    let performer: Performer =
                        r.vocab(r.required(stobj, "performer", &stctx)?, "performer")?;
                    let action = r.string(r.required(stobj, "action", &stctx)?, "action")?;
                    let step = Step::new(order, performer, action)
                        .map_err(|e| r.fail(Code::T012, format!("{stctx}: {e}")))?;
                    steps.push(step);
                }
                scenarios.push(Scenario::new(sid, skind, steps));
            }
            Ok(apply_common(
                Element::new(
                    id,
                    ElementBody::UseCase(UseCase { kind: uc_kind, primary_actor, data_entities, scenarios }),
                ),
                name,
                description,
            ))
        }
        "UserStory" => {
            r.check_keys(
                obj,
                &["kind", "id", "name", "description", "asA", "iWant", "soThat", "priority"],
                context,
            )?;
            let (id, name, description) = read_common(r, obj, context)?;
            let as_a = r.ident(r.required(obj, "asA", context)?, "asA")?;
            let i_want = r.string(r.required(obj, "iWant", context)?, "iWant")?;
            if i_want.trim().is_empty() {
                r.fail(Code::T012, format!("{context}: iWant must not be empty"));
                return Err(());
            }
            let so_that = match obj.get("soThat") {
                Some(v) => Some(r.string(v, "soThat")?),
                None => None,
            };
            let priority = read_priority(r, obj)?;
            Ok(apply_common(
                Element::new(id, ElementBody::UserStory(UserStory { as_a, i_want, so_that, priority })),
                name,
                description,
            ))
        }
        "Goal" => {
            r.check_keys(obj, &["kind", "id", "name", "description", "parent", "priority"], context)?;
            let (id, name, description) = read_common(r, obj, context)?;
            let parent = match obj.get("parent") {
                Some(v) => Some(r.ident(v, "parent")?),
                None => None,
            };
            let priority = read_priority(r, obj)?;
            Ok(apply_common(
                Element::new(id, ElementBody::Goal(Goal { parent, priority })),
                name,
                description,
            ))
        }
        "QualityRequirement" => {
            r.check_keys(
                obj,
                &["kind", "id", "name", "description", "qrKind", "metric", "targetValue"],
                context,
            )?;
            let (id, name, description) = read_common(r, obj, context)?;
            let qr_kind: QrKind = r.vocab(r.required(obj, "qrKind", context)?, "qrKind")?;
            let metric = match obj.get("metric") {
                Some(v) => Some(r.string(v, "metric")?),
                None => None,
            };
            let target_value = match obj.get("targetValue") {
                Some(v) => Some(r.string(v, "targetValue")?),
                None => None,
            };
            Ok(apply_common(
                Element::new(
                    id,
                    ElementBody::QualityRequirement(QualityRequirement {
                        kind: qr_kind,
                        metric,
                        target_value,
                    }),
                ),
                name,
                description,
            ))
        }
        "TestCase" => {
            r.check_keys(
                obj,
                &["kind", "id", "name", "description", "traces", "scenario", "given", "when", "then"],
                context,
            )?;
            let (id, name, description) = read_common(r, obj, context)?;
            let traces_to = r.ident(r.required(obj, "traces", context)?, "traces")?;
            let scenario = match obj.get("scenario") {
                Some(v) => Some(r.ident(v, "scenario")?),
                None => None,
            };
            let given = r.string_list(r.required(obj, "given", context)?, "given")?;
            let when = r.string_list(r.required(obj, "when", context)?, "when")?;
            let then = r.string_list(r.required(obj, "then", context)?, "then")?;
            Ok(apply_common(
                Element::new(
                    id,
                    ElementBody::TestCase(TestCase { traces_to, scenario, given, when, then }),
                ),
                name,
                description,
            ))
        }
        "GlossaryTerm" => {
            r.check_keys(
                obj,
                &["kind", "term", "partOfSpeech", "definition", "synonyms", "preferred"],
                context,
            )?;
            let term = r.string(r.required(obj, "term", context)?, "term")?;
            let part_of_speech: PartOfSpeech =
                r.vocab(r.required(obj, "partOfSpeech", context)?, "partOfSpeech")?;
            let definition = match obj.get("definition") {
                Some(v) => Some(r.string(v, "definition")?),
                None => None,
            };
            let synonyms = r.string_list(r.required(obj, "synonyms", context)?, "synonyms")?;
            let preferred = r
                .required(obj, "preferred", context)?
                .as_bool()
                .ok_or_else(|| r.fail(Code::T012, format!("{context}: preferred must be a boolean")))?;
            Element::glossary(term, part_of_speech, definition, synonyms, preferred)
                .map_err(|e| r.fail(Code::T012, format!("{context}: {e}")))
        }
        other => {
            r.fail(Code::T012, format!("{context}: unknown element kind '{other}'"));
            Err(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelgen::ModelGenerator;

    #[test]
    fn empty_model_exports_exactly() {
        let m = SpecificationModel::new(QualifiedName::parse("p").unwrap());
        assert_eq!(
            export_json(&m),
            r#"{"schemaVersion":"1","package":"p","imports":[],"elements":[]}"#
        );
    }

    #[test]
    fn export_is_deterministic() {
        let mut gen = ModelGenerator::new(3);
        let m = gen.model();
        assert_eq!(export_json(&m), export_json(&m));
    }

    #[test]
    fn round_trip_equals_canonicalized_source() {
        let mut gen = ModelGenerator::new(42);
        for _ in 0..50 {
            let m = gen.model();
            let back = import_json(&export_json(&m)).expect("round trip must import");
            assert!(back.structural_eq(&m.canonicalized()), "mismatch for {m:#?}");
        }
    }

    #[test]
    fn wrong_schema_version_reports_t011() {
        let err = import_json(r#"{"schemaVersion":"2","package":"p","imports":[],"elements":[]}"#)
            .unwrap_err();
        assert_eq!(err[0].code, Code::T011);
    }

    #[test]
    fn truncated_document_reports_t012() {
        let err = import_json(r#"{"schemaVersion":"1","package":"p","#).unwrap_err();
        assert_eq!(err[0].code, Code::T012);
    }

    #[test]
    fn unknown_fields_report_t010() {
        let err = import_json(
            r#"{"schemaVersion":"1","package":"p","imports":[],"elements":[],"extra":1}"#,
        )
        .unwrap_err();
        assert_eq!(err[0].code, Code::T010);
        assert!(err[0].message.contains("extra"));

        let err = import_json(
            r#"{"schemaVersion":"1","package":"p","imports":[],"elements":[{"kind":"Actor","id":"a","actorKind":"User","bogus":true}]}"#,
        )
        .unwrap_err();
        assert_eq!(err[0].code, Code::T010);
        assert!(err[0].message.contains("bogus"));
    }

    #[test]
    fn duplicate_ids_report_c001() {
        let err = import_json(
            r#"{"schemaVersion":"1","package":"p","imports":[],"elements":[
                {"kind":"Actor","id":"a","actorKind":"User"},
                {"kind":"Actor","id":"a","actorKind":"Timer"}]}"#,
        )
        .unwrap_err();
        assert_eq!(err[0].code, Code::C001);
    }
}

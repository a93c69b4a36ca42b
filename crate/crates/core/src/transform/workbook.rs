//! Tabular workbook import/export: one RFC-4180 CSV file per element
//! kind plus `package.csv`, UTF-8, LF, header row mandatory.
//!
//! Child tables (`attributes.csv`, `scenarios.csv`, `steps.csv`) carry
//! parent-id columns and rely on row order for list order. Top-level
//! element tables carry a `position` column so the interleaved element
//! order of the model survives the per-kind split; the column is optional
//! on import (rows without it keep file order, grouped by kind). List
//! cells (synonyms, imports, given/when/then, data entities, constraints)
//! pack entries with `|`, escaping `\` and `|` with a backslash.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::diag::{Code, Diagnostic};
use crate::model::*;

/// The normative file set.
pub const WORKBOOK_FILES: &[&str] = &[
    "package.csv",
    "actors.csv",
    "data_entities.csv",
    "attributes.csv",
    "use_cases.csv",
    "scenarios.csv",
    "steps.csv",
    "user_stories.csv",
    "goals.csv",
    "quality_requirements.csv",
    "test_cases.csv",
    "glossary.csv",
];

// ---------------------------------------------------------------------------
// List-cell packing
// ---------------------------------------------------------------------------

pub fn pack_list<S: AsRef<str>>(items: &[S]) -> String {
    let mut out = String::new();
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        for c in item.as_ref().chars() {
            match c {
                '\\' => out.push_str("\\\\"),
                '|' => out.push_str("\\|"),
                _ => out.push(c),
            }
        }
    }
    out
}

pub fn unpack_list(cell: &str) -> Vec<String> {
    if cell.is_empty() {
        return Vec::new();
    }
    let mut items = Vec::new();
    let mut current = String::new();
    let mut chars = cell.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                if let Some(escaped) = chars.next() {
                    current.push(escaped);
                }
            }
            '|' => items.push(std::mem::take(&mut current)),
            _ => current.push(c),
        }
    }
    items.push(current);
    items
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

fn io_error(path: &Path, e: impl std::fmt::Display) -> Vec<Diagnostic> {
    vec![Diagnostic::new(Code::T020, None, format!("{}: {e}", path.display()))]
}

struct Table {
    file: &'static str,
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(file: &'static str, header: &'static [&'static str]) -> Self {
        Table { file, header, rows: Vec::new() }
    }

    fn write(&self, dir: &Path) -> Result<(), Vec<Diagnostic>> {
        let path = dir.join(self.file);
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .map_err(|e| io_error(&path, e))?;
        writer.write_record(self.header).map_err(|e| io_error(&path, e))?;
        for row in &self.rows {
            writer.write_record(row).map_err(|e| io_error(&path, e))?;
        }
        writer.flush().map_err(|e| io_error(&path, e))
    }
}

fn opt(text: &Option<String>) -> String {
    text.clone().unwrap_or_default()
}

/// Writes all twelve files into `dir` (which is created if missing);
/// empty tables become header-only files.
pub fn export_workbook(model: &SpecificationModel, dir: &Path) -> Result<(), Vec<Diagnostic>> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;

    let mut package = Table::new("package.csv", &["package", "imports"]);
    let imports: Vec<String> = model
        .imports
        .iter()
        .map(|i| match &i.alias {
            Some(alias) => format!("{} as {}", i.target, alias),
            None => i.target.to_string(),
        })
        .collect();
    package.rows.push(vec![model.package_name.to_string(), pack_list(&imports)]);

    let mut actors = Table::new("actors.csv", &["position", "id", "name", "description", "kind"]);
    let mut entities =
        Table::new("data_entities.csv", &["position", "id", "name", "description", "kind"]);
    let mut attributes = Table::new(
        "attributes.csv",
        &["entity_id", "name", "datatype", "constraints", "references"],
    );
    let mut use_cases = Table::new(
        "use_cases.csv",
        &["position", "id", "name", "description", "kind", "primary_actor", "data_entities"],
    );
    let mut scenarios = Table::new("scenarios.csv", &["use_case_id", "id", "kind"]);
    let mut steps =
        Table::new("steps.csv", &["scenario_id", "use_case_id", "order", "performer", "action"]);
    let mut stories = Table::new(
        "user_stories.csv",
        &["position", "id", "name", "description", "as_a", "i_want", "so_that", "priority"],
    );
    let mut goals =
        Table::new("goals.csv", &["position", "id", "name", "description", "parent", "priority"]);
    let mut qrs = Table::new(
        "quality_requirements.csv",
        &["position", "id", "name", "description", "kind", "metric", "target_value"],
    );
    let mut tests = Table::new(
        "test_cases.csv",
        &["position", "id", "name", "description", "traces", "scenario", "given", "when", "then"],
    );
    let mut glossary = Table::new(
        "glossary.csv",
        &["position", "term", "part_of_speech", "definition", "synonyms", "preferred"],
    );

    for (position, element) in model.elements.iter().enumerate() {
        let position = position.to_string();
        let id = element.id.to_string();
        let name = opt(&element.name);
        let description = opt(&element.description);
        match &element.body {
            ElementBody::Actor(a) => {
                actors.rows.push(vec![position, id, name, description, a.kind.to_string()]);
            }
            ElementBody::DataEntity(entity) => {
                for attr in &entity.attributes {
                    let constraints: Vec<&str> =
                        attr.constraints.iter().map(|c| c.as_str()).collect();
                    attributes.rows.push(vec![
                        id.clone(),
                        attr.name.to_string(),
                        attr.datatype.to_string(),
                        pack_list(&constraints),
                        attr.references.as_ref().map(|r| r.to_string()).unwrap_or_default(),
                    ]);
                }
                entities.rows.push(vec![position, id, name, description, entity.kind.to_string()]);
            }
            ElementBody::UseCase(uc) => {
                for scenario in &uc.scenarios {
                    scenarios.rows.push(vec![
                        id.clone(),
                        scenario.id.to_string(),
                        scenario.kind.to_string(),
                    ]);
                    for step in &scenario.steps {
                        steps.rows.push(vec![
                            scenario.id.to_string(),
                            id.clone(),
                            step.order.to_string(),
                            step.performer.to_string(),
                            step.action.clone(),
                        ]);
                    }
                }
                let data_entities: Vec<&str> =
                    uc.data_entities.iter().map(|e| e.as_str()).collect();
                use_cases.rows.push(vec![
                    position,
                    id,
                    name,
                    description,
                    uc.kind.to_string(),
                    uc.primary_actor.as_ref().map(|a| a.to_string()).unwrap_or_default(),
                    pack_list(&data_entities),
                ]);
            }
            ElementBody::UserStory(story) => {
                stories.rows.push(vec![
                    position,
                    id,
                    name,
                    description,
                    story.as_a.to_string(),
                    story.i_want.clone(),
                    opt(&story.so_that),
                    if story.priority == Priority::Unset {
                        String::new()
                    } else {
                        story.priority.to_string()
                    },
                ]);
            }
            ElementBody::Goal(goal) => {
                goals.rows.push(vec![
                    position,
                    id,
                    name,
                    description,
                    goal.parent.as_ref().map(|p| p.to_string()).unwrap_or_default(),
                    if goal.priority == Priority::Unset {
                        String::new()
                    } else {
                        goal.priority.to_string()
                    },
                ]);
            }
            ElementBody::QualityRequirement(qr) => {
                qrs.rows.push(vec![
                    position,
                    id,
                    name,
                    description,
                    qr.kind.to_string(),
                    opt(&qr.metric),
                    opt(&qr.target_value),
                ]);
            }
            ElementBody::TestCase(tc) => {
                tests.rows.push(vec![
                    position,
                    id,
                    name,
                    description,
                    tc.traces_to.to_string(),
                    tc.scenario.as_ref().map(|s| s.to_string()).unwrap_or_default(),
                    pack_list(&tc.given),
                    pack_list(&tc.when),
                    pack_list(&tc.then),
                ]);
            }
            ElementBody::GlossaryTerm(term) => {
                glossary.rows.push(vec![
                    position,
                    term.term.clone(),
                    term.part_of_speech.to_string(),
                    description,
                    pack_list(&term.synonyms),
                    term.preferred.to_string(),
                ]);
            }
        }
    }

    for table in [
        &package, &actors, &entities, &attributes, &use_cases, &scenarios, &steps, &stories,
        &goals, &qrs, &tests, &glossary,
    ] {
        table.write(dir)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Import
// ---------------------------------------------------------------------------

/// A loaded CSV file: headers mapped to indices, rows with line numbers.
struct Sheet {
    file: String,
    columns: HashMap<String, usize>,
    rows: Vec<(u64, Vec<String>)>,
}

impl Sheet {
    fn empty(file: &str) -> Sheet {
        Sheet { file: file.to_string(), columns: HashMap::new(), rows: Vec::new() }
    }

    fn load(path: &PathBuf, diagnostics: &mut Vec<Diagnostic>) -> Result<Sheet, ()> {
        let file = path.file_name().unwrap_or_default().to_string_lossy().to_string();
        if !path.exists() {
            return Ok(Sheet::empty(&file));
        }
        let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path).map_err(|e| {
            diagnostics.push(Diagnostic::new(Code::T020, None, format!("{file}: {e}")));
        })?;
        let mut columns = HashMap::new();
        match reader.headers() {
            Ok(headers) => {
                for (i, h) in headers.iter().enumerate() {
                    columns.insert(h.to_string(), i);
                }
            }
            Err(e) => {
                diagnostics.push(Diagnostic::new(Code::T025, None, format!("{file}: {e}")));
                return Err(());
            }
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            match record {
                Ok(record) => {
                    let line = record.position().map(|p| p.line()).unwrap_or(0);
                    rows.push((line, record.iter().map(str::to_string).collect()));
                }
                Err(e) => {
                    diagnostics.push(Diagnostic::new(Code::T025, None, format!("{file}: {e}")));
                    return Err(());
                }
            }
        }
        Ok(Sheet { file, columns, rows })
    }

    fn require_columns(
        &self,
        required: &[&str],
        diagnostics: &mut Vec<Diagnostic>,
    ) -> Result<(), ()> {
        if self.rows.is_empty() && self.columns.is_empty() {
            // A missing or empty file acts as an empty table.
            return Ok(());
        }
        let mut ok = Ok(());
        for col in required {
            if !self.columns.contains_key(*col) {
                diagnostics.push(Diagnostic::new(
                    Code::T022,
                    None,
                    format!("{}: missing required column '{col}'", self.file),
                ));
                ok = Err(());
            }
        }
        ok
    }

    fn cell<'s>(&self, row: &'s [String], column: &str) -> &'s str {
        self.columns.get(column).and_then(|&i| row.get(i)).map(String::as_str).unwrap_or("")
    }
}

struct WorkbookReader {
    diagnostics: Vec<Diagnostic>,
}

impl WorkbookReader {
    fn malformed(&mut self, sheet: &Sheet, line: u64, message: impl std::fmt::Display) -> () {
        self.diagnostics.push(Diagnostic::new(
            Code::T025,
            None,
            format!("{}:{line}: {message}", sheet.file),
        ));
    }

    fn ident(&mut self, sheet: &Sheet, line: u64, cell: &str, what: &str) -> Result<Ident, ()> {
        Ident::new(cell).map_err(|_| self.malformed(sheet, line, format!("{what}: '{cell}' is not a valid identifier")))
    }

    fn opt_ident(
        &mut self,
        sheet: &Sheet,
        line: u64,
        cell: &str,
        what: &str,
    ) -> Result<Option<Ident>, ()> {
        if cell.is_empty() {
            Ok(None)
        } else {
            self.ident(sheet, line, cell, what).map(Some)
        }
    }

    fn vocab<T: std::str::FromStr<Err = ModelError>>(
        &mut self,
        sheet: &Sheet,
        line: u64,
        cell: &str,
        what: &str,
    ) -> Result<T, ()> {
        cell.parse::<T>().map_err(|e| {
            self.diagnostics.push(Diagnostic::new(
                Code::T025,
                None,
                format!("{}:{line}: {what}: {e}", sheet.file),
            ));
        })
    }

    /// Vocabulary cells get the dedicated bad-literal code `RSL-T023`.
    fn vocab_cell<T: std::str::FromStr<Err = ModelError>>(
        &mut self,
        sheet: &Sheet,
        line: u64,
        cell: &str,
        what: &str,
    ) -> Result<T, ()> {
        cell.parse::<T>().map_err(|e| {
            self.diagnostics.push(Diagnostic::new(
                Code::T023,
                None,
                format!("{}:{line}: {what}: {e}", sheet.file),
            ));
        })
    }

    fn priority(&mut self, sheet: &Sheet, line: u64, cell: &str) -> Result<Priority, ()> {
        if cell.is_empty() {
            Ok(Priority::Unset)
        } else {
            self.vocab_cell(sheet, line, cell, "priority")
        }
    }
}

fn non_empty(s: &str) -> Option<String> {
    (!s.is_empty()).then(|| s.to_string())
}

/// Outcome of a workbook import: the model is present iff no
/// error-severity diagnostic was produced; warnings (unknown files) can
/// accompany a successful import.
#[derive(Debug, Clone)]
pub struct WorkbookImport {
    pub model: Option<SpecificationModel>,
    pub diagnostics: Vec<Diagnostic>,
}

impl WorkbookImport {
    pub fn into_result(self) -> Result<SpecificationModel, Vec<Diagnostic>> {
        match self.model {
            Some(m) => Ok(m),
            None => Err(self.diagnostics),
        }
    }
}

/// Reads a workbook directory back into a model. Violations of the
/// workbook invariants yield `RSL-T021` (orphan row), `RSL-T022` (missing
/// column or file), `RSL-T023` (bad vocabulary literal) or `RSL-T025`
/// (malformed cell); unknown files warn with `RSL-T024`. Any error
/// suppresses the model.
pub fn import_workbook(dir: &Path) -> WorkbookImport {
    let mut r = WorkbookReader { diagnostics: Vec::new() };

    if !dir.is_dir() {
        return WorkbookImport {
            model: None,
            diagnostics: vec![Diagnostic::new(
                Code::T020,
                None,
                format!("{}: not a readable directory", dir.display()),
            )],
        };
    }
    match std::fs::read_dir(dir) {
        Ok(entries) => {
            let mut unknown: Vec<String> = entries
                .filter_map(|e| e.ok())
                .map(|e| e.file_name().to_string_lossy().to_string())
                .filter(|name| !WORKBOOK_FILES.contains(&name.as_str()))
                .collect();
            unknown.sort();
            for name in unknown {
                r.diagnostics.push(Diagnostic::new(
                    Code::T024,
                    None,
                    format!("{name}: not a workbook file, ignored"),
                ));
            }
        }
        Err(e) => return WorkbookImport { model: None, diagnostics: io_error(dir, e) },
    }

    let result = read_workbook(&mut r, dir);
    let has_errors = r.diagnostics.iter().any(|d| d.is_error());
    let model = match result {
        Ok(model) if !has_errors => Some(model),
        _ => None,
    };
    WorkbookImport { model, diagnostics: r.diagnostics }
}

fn read_workbook(r: &mut WorkbookReader, dir: &Path) -> Result<SpecificationModel, ()> {
    let load = |name: &str, r: &mut WorkbookReader| Sheet::load(&dir.join(name), &mut r.diagnostics);

    let package_sheet = load("package.csv", r)?;
    package_sheet.require_columns(&["package"], &mut r.diagnostics)?;
    let (package_name, imports) = match package_sheet.rows.first() {
        Some((line, row)) => {
            let raw = package_sheet.cell(row, "package");
            let name = QualifiedName::parse(raw)
                .map_err(|e| r.malformed(&package_sheet, *line, e))?;
            (name, unpack_list(package_sheet.cell(row, "imports")))
        }
        None => {
            r.diagnostics.push(Diagnostic::new(
                Code::T022,
                None,
                "package.csv: missing required file or data row".to_string(),
            ));
            return Err(());
        }
    };
    let mut model = SpecificationModel::new(package_name);
    for (line, _) in package_sheet.rows.iter().skip(1) {
        r.malformed(&package_sheet, *line, "package.csv must have exactly one data row");
    }
    for import in &imports {
        let (target, alias) = match import.split_once(" as ") {
            Some((t, a)) => (t.trim(), Some(a.trim().to_string())),
            None => (import.trim(), None),
        };
        let target = QualifiedName::parse(target)
            .map_err(|e| r.malformed(&package_sheet, 2, format!("imports: {e}")))?;
        let decl = ImportDecl::new(target, alias)
            .map_err(|e| r.malformed(&package_sheet, 2, format!("imports: {e}")))?;
        model
            .add_import(decl)
            .map_err(|e| r.malformed(&package_sheet, 2, format!("imports: {e}")))?;
    }

    // (position, file order, element) collected across all element tables.
    let mut collected: Vec<(Option<usize>, usize, Element)> = Vec::new();
    let mut file_order = 0usize;

    let mut push = |collected: &mut Vec<(Option<usize>, usize, Element)>,
                    position: Option<usize>,
                    element: Element| {
        collected.push((position, file_order, element));
        file_order += 1;
    };

    let position_of = |r: &mut WorkbookReader, sheet: &Sheet, line: u64, row: &[String]| -> Result<Option<usize>, ()> {
        let cell = sheet.cell(row, "position");
        if cell.is_empty() {
            return Ok(None);
        }
        cell.parse::<usize>()
            .map(Some)
            .map_err(|_| r.malformed(sheet, line, format!("position '{cell}' is not an integer")))
    };

    // Attributes joined to entities.
    let entities_sheet = load("data_entities.csv", r)?;
    entities_sheet.require_columns(&["id", "kind"], &mut r.diagnostics)?;
    let attributes_sheet = load("attributes.csv", r)?;
    attributes_sheet.require_columns(&["entity_id", "name", "datatype"], &mut r.diagnostics)?;

    let entity_ids: Vec<String> = entities_sheet
        .rows
        .iter()
        .map(|(_, row)| entities_sheet.cell(row, "id").to_string())
        .collect();
    let mut entity_attrs: HashMap<String, Vec<DataAttribute>> = HashMap::new();
    for (line, row) in &attributes_sheet.rows {
        let entity_id = attributes_sheet.cell(row, "entity_id");
        if !entity_ids.iter().any(|id| id == entity_id) {
            r.diagnostics.push(Diagnostic::new(
                Code::T021,
                None,
                format!(
                    "attributes.csv:{line}: row references entity '{entity_id}' which has no data_entities.csv row"
                ),
            ));
            continue;
        }
        let name = r.ident(&attributes_sheet, *line, attributes_sheet.cell(row, "name"), "name")?;
        let datatype: DataType =
            r.vocab_cell(&attributes_sheet, *line, attributes_sheet.cell(row, "datatype"), "datatype")?;
        let mut constraints = Vec::new();
        for c in unpack_list(attributes_sheet.cell(row, "constraints")) {
            constraints.push(r.vocab_cell::<AttrConstraint>(&attributes_sheet, *line, &c, "constraints")?);
        }
        let references = r.opt_ident(
            &attributes_sheet,
            *line,
            attributes_sheet.cell(row, "references"),
            "references",
        )?;
        entity_attrs
            .entry(entity_id.to_string())
            .or_default()
            .push(DataAttribute::new(name, datatype, constraints, references));
    }

    for (line, row) in &entities_sheet.rows {
        let position = position_of(r, &entities_sheet, *line, row)?;
        let id = r.ident(&entities_sheet, *line, entities_sheet.cell(row, "id"), "id")?;
        let kind: EntityKind =
            r.vocab_cell(&entities_sheet, *line, entities_sheet.cell(row, "kind"), "kind")?;
        let attributes = entity_attrs.remove(id.as_str()).unwrap_or_default();
        let mut element = Element::new(id, ElementBody::DataEntity(DataEntity { kind, attributes }));
        element = element.with_name(entities_sheet.cell(row, "name"));
        element = element.with_description(entities_sheet.cell(row, "description"));
        push(&mut collected, position, element);
    }

    // Scenarios and steps joined to use cases.
    let use_cases_sheet = load("use_cases.csv", r)?;
    use_cases_sheet.require_columns(&["id", "kind"], &mut r.diagnostics)?;
    let scenarios_sheet = load("scenarios.csv", r)?;
    scenarios_sheet.require_columns(&["use_case_id", "id", "kind"], &mut r.diagnostics)?;
    let steps_sheet = load("steps.csv", r)?;
    steps_sheet.require_columns(
        &["scenario_id", "use_case_id", "order", "performer", "action"],
        &mut r.diagnostics,
    )?;

    let use_case_ids: Vec<String> = use_cases_sheet
        .rows
        .iter()
        .map(|(_, row)| use_cases_sheet.cell(row, "id").to_string())
        .collect();
    // (use case id, scenario): scenario row order is list order.
    let mut scenario_lists: Vec<(String, Scenario)> = Vec::new();
    for (line, row) in &scenarios_sheet.rows {
        let uc_id = scenarios_sheet.cell(row, "use_case_id");
        if !use_case_ids.iter().any(|id| id == uc_id) {
            r.diagnostics.push(Diagnostic::new(
                Code::T021,
                None,
                format!(
                    "scenarios.csv:{line}: row references use case '{uc_id}' which has no use_cases.csv row"
                ),
            ));
            continue;
        }
        let id = r.ident(&scenarios_sheet, *line, scenarios_sheet.cell(row, "id"), "id")?;
        let kind: ScenarioKind =
            r.vocab_cell(&scenarios_sheet, *line, scenarios_sheet.cell(row, "kind"), "kind")?;
        scenario_lists.push((uc_id.to_string(), Scenario::new(id, kind, Vec::new())));
    }
    for (line, row) in &steps_sheet.rows {
        let uc_id = steps_sheet.cell(row, "use_case_id");
        let scenario_id = steps_sheet.cell(row, "scenario_id");
        let target = scenario_lists
            .iter_mut()
            .find(|(uc, s)| uc == uc_id && s.id.as_str() == scenario_id);
        let Some((_, scenario)) = target else {
            r.diagnostics.push(Diagnostic::new(
                Code::T021,
                None,
                format!(
                    "steps.csv:{line}: row references scenario '{scenario_id}' of use case '{uc_id}' which has no scenarios.csv row"
                ),
            ));
            continue;
        };
        let order_cell = steps_sheet.cell(row, "order");
        let order: u32 = order_cell
            .parse()
            .map_err(|_| r.malformed(&steps_sheet, *line, format!("order '{order_cell}' is not a positive integer")))?;
        let performer: Performer =
            r.vocab_cell(&steps_sheet, *line, steps_sheet.cell(row, "performer"), "performer")?;
        let action = steps_sheet.cell(row, "action");
        let step = Step::new(order, performer, action)
            .map_err(|e| r.malformed(&steps_sheet, *line, e))?;
        scenario.steps.push(step);
    }

    for (line, row) in &use_cases_sheet.rows {
        let position = position_of(r, &use_cases_sheet, *line, row)?;
        let id = r.ident(&use_cases_sheet, *line, use_cases_sheet.cell(row, "id"), "id")?;
        let kind: UseCaseKind =
            r.vocab_cell(&use_cases_sheet, *line, use_cases_sheet.cell(row, "kind"), "kind")?;
        let primary_actor = r.opt_ident(
            &use_cases_sheet,
            *line,
            use_cases_sheet.cell(row, "primary_actor"),
            "primary_actor",
        )?;
        let mut data_entities = Vec::new();
        for e in unpack_list(use_cases_sheet.cell(row, "data_entities")) {
            data_entities.push(r.ident(&use_cases_sheet, *line, &e, "data_entities")?);
        }
        let scenarios: Vec<Scenario> = scenario_lists
            .iter()
            .filter(|(uc, _)| uc == id.as_str())
            .map(|(_, s)| s.clone())
            .collect();
        let mut element = Element::new(
            id,
            ElementBody::UseCase(UseCase { kind, primary_actor, data_entities, scenarios }),
        );
        element = element.with_name(use_cases_sheet.cell(row, "name"));
        element = element.with_description(use_cases_sheet.cell(row, "description"));
        push(&mut collected, position, element);
    }

    let actors_sheet = load("actors.csv", r)?;
    actors_sheet.require_columns(&["id", "kind"], &mut r.diagnostics)?;
    for (line, row) in &actors_sheet.rows {
        let position = position_of(r, &actors_sheet, *line, row)?;
        let id = r.ident(&actors_sheet, *line, actors_sheet.cell(row, "id"), "id")?;
        let kind: ActorKind =
            r.vocab_cell(&actors_sheet, *line, actors_sheet.cell(row, "kind"), "kind")?;
        let mut element = Element::new(id, ElementBody::Actor(Actor { kind }));
        element = element.with_name(actors_sheet.cell(row, "name"));
        element = element.with_description(actors_sheet.cell(row, "description"));
        push(&mut collected, position, element);
    }

    let stories_sheet = load("user_stories.csv", r)?;
    stories_sheet.require_columns(&["id", "as_a", "i_want"], &mut r.diagnostics)?;
    for (line, row) in &stories_sheet.rows {
        let position = position_of(r, &stories_sheet, *line, row)?;
        let id = r.ident(&stories_sheet, *line, stories_sheet.cell(row, "id"), "id")?;
        let as_a = r.ident(&stories_sheet, *line, stories_sheet.cell(row, "as_a"), "as_a")?;
        let i_want = stories_sheet.cell(row, "i_want").to_string();
        if i_want.trim().is_empty() {
            r.malformed(&stories_sheet, *line, "i_want must not be empty");
            return Err(());
        }
        let so_that = non_empty(stories_sheet.cell(row, "so_that"));
        let priority = r.priority(&stories_sheet, *line, stories_sheet.cell(row, "priority"))?;
        let mut element = Element::new(
            id,
            ElementBody::UserStory(UserStory { as_a, i_want, so_that, priority }),
        );
        element = element.with_name(stories_sheet.cell(row, "name"));
        element = element.with_description(stories_sheet.cell(row, "description"));
        push(&mut collected, position, element);
    }

    let goals_sheet = load("goals.csv", r)?;
    goals_sheet.require_columns(&["id"], &mut r.diagnostics)?;
    for (line, row) in &goals_sheet.rows {
        let position = position_of(r, &goals_sheet, *line, row)?;
        let id = r.ident(&goals_sheet, *line, goals_sheet.cell(row, "id"), "id")?;
        let parent = r.opt_ident(&goals_sheet, *line, goals_sheet.cell(row, "parent"), "parent")?;
        let priority = r.priority(&goals_sheet, *line, goals_sheet.cell(row, "priority"))?;
        let mut element = Element::new(id, ElementBody::Goal(Goal { parent, priority }));
        element = element.with_name(goals_sheet.cell(row, "name"));
        element = element.with_description(goals_sheet.cell(row, "description"));
        push(&mut collected, position, element);
    }

    let qrs_sheet = load("quality_requirements.csv", r)?;
    qrs_sheet.require_columns(&["id", "kind"], &mut r.diagnostics)?;
    for (line, row) in &qrs_sheet.rows {
        let position = position_of(r, &qrs_sheet, *line, row)?;
        let id = r.ident(&qrs_sheet, *line, qrs_sheet.cell(row, "id"), "id")?;
        let kind: QrKind = r.vocab_cell(&qrs_sheet, *line, qrs_sheet.cell(row, "kind"), "kind")?;
        let metric = non_empty(qrs_sheet.cell(row, "metric"));
        let target_value = non_empty(qrs_sheet.cell(row, "target_value"));
        let mut element = Element::new(
            id,
            ElementBody::QualityRequirement(QualityRequirement { kind, metric, target_value }),
        );
        element = element.with_name(qrs_sheet.cell(row, "name"));
        element = element.with_description(qrs_sheet.cell(row, "description"));
        push(&mut collected, position, element);
    }

    let tests_sheet = load("test_cases.csv", r)?;
    tests_sheet.require_columns(&["id", "traces"], &mut r.diagnostics)?;
    for (line, row) in &tests_sheet.rows {
        let position = position_of(r, &tests_sheet, *line, row)?;
        let id = r.ident(&tests_sheet, *line, tests_sheet.cell(row, "id"), "id")?;
        let traces_to = r.ident(&tests_sheet, *line, tests_sheet.cell(row, "traces"), "traces")?;
        let scenario =
            r.opt_ident(&tests_sheet, *line, tests_sheet.cell(row, "scenario"), "scenario")?;
        let given = unpack_list(tests_sheet.cell(row, "given"));
        let when = unpack_list(tests_sheet.cell(row, "when"));
        let then = unpack_list(tests_sheet.cell(row, "then"));
        for text in given.iter().chain(&when).chain(&then) {
            if text.trim().is_empty() {
                r.malformed(&tests_sheet, *line, "given/when/then entries must not be empty");
                return Err(());
            }
        }
        let mut element = Element::new(
            id,
            ElementBody::TestCase(TestCase { traces_to, scenario, given, when, then }),
        );
        element = element.with_name(tests_sheet.cell(row, "name"));
        element = element.with_description(tests_sheet.cell(row, "description"));
        push(&mut collected, position, element);
    }

    let glossary_sheet = load("glossary.csv", r)?;
    glossary_sheet.require_columns(&["term", "part_of_speech"], &mut r.diagnostics)?;
    for (line, row) in &glossary_sheet.rows {
        let position = position_of(r, &glossary_sheet, *line, row)?;
        let term = glossary_sheet.cell(row, "term");
        let part_of_speech: PartOfSpeech = r.vocab_cell(
            &glossary_sheet,
            *line,
            glossary_sheet.cell(row, "part_of_speech"),
            "part_of_speech",
        )?;
        let definition = non_empty(glossary_sheet.cell(row, "definition"));
        let synonyms = unpack_list(glossary_sheet.cell(row, "synonyms"));
        let preferred = match glossary_sheet.cell(row, "preferred") {
            "" | "true" => true,
            "false" => false,
            other => {
                r.malformed(&glossary_sheet, *line, format!("preferred '{other}' must be true or false"));
                return Err(());
            }
        };
        let element = Element::glossary(term, part_of_speech, definition, synonyms, preferred)
            .map_err(|e| r.malformed(&glossary_sheet, *line, e))?;
        push(&mut collected, position, element);
    }

    // Rows with positions sort by position; the rest keep kind-grouped
    // file order after them. The sort is stable so ties stay deterministic.
    collected.sort_by_key(|(position, order, _)| match position {
        Some(p) => (0, *p, *order),
        None => (1, 0, *order),
    });
    for (_, _, element) in collected {
        if let Err(d) = model.push_element(element) {
            r.diagnostics.push(d);
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelgen::ModelGenerator;

    #[test]
    fn pack_round_trips_tricky_items() {
        let items = vec!["plain", "pi|pe", "back\\slash", "a|b\\c", "com,ma"];
        let packed = pack_list(&items);
        assert_eq!(unpack_list(&packed), items);
        assert_eq!(unpack_list(""), Vec::<String>::new());
    }

    #[test]
    fn empty_model_writes_twelve_header_only_files() {
        let dir = tempfile::tempdir().unwrap();
        let m = SpecificationModel::new(QualifiedName::parse("p").unwrap());
        export_workbook(&m, dir.path()).unwrap();
        for file in WORKBOOK_FILES {
            let path = dir.path().join(file);
            assert!(path.exists(), "{file} missing");
            let content = std::fs::read_to_string(&path).unwrap();
            let lines: Vec<&str> = content.lines().collect();
            let expected = if *file == "package.csv" { 2 } else { 1 };
            assert_eq!(lines.len(), expected, "{file}: {content}");
        }
    }

    #[test]
    fn generated_models_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut gen = ModelGenerator::new(99);
        for _ in 0..40 {
            let m = gen.model();
            export_workbook(&m, dir.path()).unwrap();
            let back = import_workbook(dir.path()).into_result().expect("workbook must import");
            assert!(back.structural_eq(&m.canonicalized()), "mismatch for {m:#?}");
        }
    }

    #[test]
    fn orphan_step_row_reports_t021_with_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let m = SpecificationModel::new(QualifiedName::parse("p").unwrap());
        export_workbook(&m, dir.path()).unwrap();
        std::fs::write(
            dir.path().join("steps.csv"),
            "scenario_id,use_case_id,order,performer,action\ns1,uc1,1,Actor,does\n",
        )
        .unwrap();
        let err = import_workbook(dir.path()).into_result().unwrap_err();
        let orphan: Vec<_> = err.iter().filter(|d| d.code == Code::T021).collect();
        assert_eq!(orphan.len(), 1);
        assert!(orphan[0].message.contains("steps.csv:2"), "{}", orphan[0].message);
    }

    #[test]
    fn missing_kind_column_reports_t022() {
        let dir = tempfile::tempdir().unwrap();
        let m = SpecificationModel::new(QualifiedName::parse("p").unwrap());
        export_workbook(&m, dir.path()).unwrap();
        std::fs::write(dir.path().join("actors.csv"), "position,id,name\n0,a,A\n").unwrap();
        let err = import_workbook(dir.path()).into_result().unwrap_err();
        assert!(err.iter().any(|d| d.code == Code::T022));
    }

    #[test]
    fn bad_vocabulary_literal_reports_t023() {
        let dir = tempfile::tempdir().unwrap();
        let m = SpecificationModel::new(QualifiedName::parse("p").unwrap());
        export_workbook(&m, dir.path()).unwrap();
        std::fs::write(
            dir.path().join("actors.csv"),
            "position,id,name,description,kind\n0,a,,,Pilot\n",
        )
        .unwrap();
        let err = import_workbook(dir.path()).into_result().unwrap_err();
        assert!(err.iter().any(|d| d.code == Code::T023));
    }

    #[test]
    fn unknown_file_warns_but_imports() {
        let dir = tempfile::tempdir().unwrap();
        let m = SpecificationModel::new(QualifiedName::parse("p").unwrap());
        export_workbook(&m, dir.path()).unwrap();
        std::fs::write(dir.path().join("notes.txt"), "hello").unwrap();
        let outcome = import_workbook(dir.path());
        assert!(outcome.model.is_some());
        assert_eq!(outcome.diagnostics.len(), 1);
        assert_eq!(outcome.diagnostics[0].code, Code::T024);
    }

    #[test]
    fn missing_optional_files_are_empty_tables() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("package.csv"), "package,imports\np,\n").unwrap();
        let model = import_workbook(dir.path()).into_result().unwrap();
        assert!(model.elements.is_empty());
        assert_eq!(model.package_name.to_string(), "p");
    }

    #[test]
    fn missing_package_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = import_workbook(dir.path()).into_result().unwrap_err();
        assert!(err.iter().any(|d| d.code == Code::T022));
    }
}

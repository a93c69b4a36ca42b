//! Recursive-descent parser with single-token lookahead.
//!
//! A malformed element yields a diagnostic and parsing resumes at the next
//! element keyword (bracket depth is tracked so keywords inside blocks do
//! not trigger premature synchronization). Duplicate identifiers keep the
//! first declaration and drop the rest.

use crate::diag::{Code, Diagnostic};
use crate::model::*;
use crate::parse::lexer::{tokenize, Token, TokenKind};
use crate::span::SourceSpan;

/// Outcome of a parse: `model` is present whenever the package header was
/// readable; its absence implies at least one error diagnostic.
#[derive(Debug, Clone)]
pub struct ParseResult {
    pub model: Option<SpecificationModel>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseResult {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.is_error())
    }

    /// The model, provided parsing produced one without any error.
    pub fn into_clean_model(self) -> Result<SpecificationModel, Vec<Diagnostic>> {
        if self.has_errors() {
            return Err(self.diagnostics);
        }
        match self.model {
            Some(m) => Ok(m),
            None => Err(self.diagnostics),
        }
    }
}

/// Marker: a diagnostic was already recorded, synchronize and go on.
struct Recover;

type Parsed<T> = Result<T, Recover>;

const ELEMENT_KEYWORDS: &[&str] = &[
    "Actor", "DataEntity", "UseCase", "UserStory", "Goal", "QR", "TestCase", "Term", "Import",
];

pub fn parse(source: &str, file: &str) -> ParseResult {
    let tokens = match tokenize(source, file) {
        Ok(tokens) => tokens,
        Err(d) => return ParseResult { model: None, diagnostics: vec![d] },
    };
    let tokens: Vec<Token> = tokens.into_iter().filter(|t| t.kind != TokenKind::Comment).collect();
    let mut parser = Parser { tokens, pos: 0, diagnostics: Vec::new(), file };
    let model = parser.package();
    ParseResult { model, diagnostics: parser.diagnostics }
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
    file: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1).min(self.tokens.len() - 1)].span.clone()
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Keyword && t.text == kw
    }

    fn at_punct(&self, p: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Punct && t.text == p
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error_here(&mut self, code: Code, message: impl Into<String>) -> Recover {
        let span = self.peek().span.clone();
        self.diagnostics.push(Diagnostic::new(code, Some(span), message));
        Recover
    }

    fn describe(t: &Token) -> String {
        match t.kind {
            TokenKind::Eof => "end of input".to_string(),
            _ => format!("'{}'", t.text),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Parsed<Token> {
        if self.at_keyword(kw) {
            Ok(self.advance())
        } else {
            let found = Self::describe(self.peek());
            Err(self.error_here(Code::P010, format!("expected '{kw}', found {found}")))
        }
    }

    fn expect_punct(&mut self, p: &str) -> Parsed<Token> {
        if self.at_punct(p) {
            Ok(self.advance())
        } else {
            let found = Self::describe(self.peek());
            Err(self.error_here(Code::P010, format!("expected '{p}', found {found}")))
        }
    }

    fn expect_identifier(&mut self, what: &str) -> Parsed<Token> {
        if self.peek().kind == TokenKind::Identifier {
            Ok(self.advance())
        } else {
            let found = Self::describe(self.peek());
            Err(self.error_here(Code::P010, format!("expected {what}, found {found}")))
        }
    }

    fn expect_string(&mut self, what: &str) -> Parsed<String> {
        if self.peek().kind == TokenKind::StringLiteral {
            Ok(self.advance().string_value())
        } else {
            let found = Self::describe(self.peek());
            Err(self.error_here(Code::P010, format!("expected {what} string, found {found}")))
        }
    }

    /// An identifier, optionally dot-qualified (`alias.id`).
    fn reference(&mut self, what: &str) -> Parsed<Ident> {
        let first = self.expect_identifier(what)?;
        let mut text = first.text;
        while self.at_punct(".") {
            self.advance();
            let seg = self.expect_identifier("identifier segment after '.'")?;
            text.push('.');
            text.push_str(&seg.text);
        }
        Ident::new(text).map_err(|e| self.error_here(Code::P014, e.to_string()))
    }

    fn qualified_name(&mut self) -> Parsed<QualifiedName> {
        let first = self.expect_identifier("package name")?;
        let mut text = first.text;
        while self.at_punct(".") {
            self.advance();
            let seg = self.expect_identifier("identifier segment after '.'")?;
            text.push('.');
            text.push_str(&seg.text);
        }
        QualifiedName::parse(&text).map_err(|e| self.error_here(Code::P014, e.to_string()))
    }

    /// A vocabulary literal; violations name the allowed set (`RSL-P012`).
    fn vocab<T: std::str::FromStr<Err = ModelError>>(&mut self, what: &str) -> Parsed<T> {
        let t = self.peek().clone();
        if t.kind != TokenKind::Identifier {
            let found = Self::describe(&t);
            return Err(self.error_here(Code::P010, format!("expected {what}, found {found}")));
        }
        match t.text.parse::<T>() {
            Ok(v) => {
                self.advance();
                Ok(v)
            }
            Err(e) => Err(self.error_here(Code::P012, e.to_string())),
        }
    }

    /// Optional quoted display name directly after an element id.
    fn optional_name(&mut self) -> Option<String> {
        if self.peek().kind == TokenKind::StringLiteral {
            Some(self.advance().string_value())
        } else {
            None
        }
    }

    /// Optional `description "..."` entry at the start of a block.
    fn optional_description(&mut self) -> Parsed<Option<String>> {
        if self.eat_keyword("description") {
            Ok(Some(self.expect_string("description")?))
        } else {
            Ok(None)
        }
    }

    /// Skips tokens until an element boundary: the next element keyword or
    /// the package-closing `}` at the current nesting level.
    fn sync_to_element_boundary(&mut self) {
        let mut depth: i64 = 0;
        loop {
            let t = self.peek();
            match t.kind {
                TokenKind::Eof => return,
                TokenKind::Punct if t.text == "[" || t.text == "{" => {
                    depth += 1;
                    self.advance();
                }
                TokenKind::Punct if t.text == "]" => {
                    depth -= 1;
                    self.advance();
                }
                TokenKind::Punct if t.text == "}" => {
                    if depth <= 0 {
                        return;
                    }
                    depth -= 1;
                    self.advance();
                }
                TokenKind::Keyword
                    if depth <= 0 && ELEMENT_KEYWORDS.contains(&t.text.as_str()) =>
                {
                    return;
                }
                _ => {
                    self.advance();
                }
            }
        }
    }

    fn package(&mut self) -> Option<SpecificationModel> {
        let header = (|| -> Parsed<SpecificationModel> {
            self.expect_keyword("Package")?;
            let name = self.qualified_name()?;
            self.expect_punct("{")?;
            Ok(SpecificationModel::new(name))
        })();
        let mut model = match header {
            Ok(m) => m,
            Err(Recover) => return None,
        };
        model.source = Some(self.file.into());

        loop {
            if self.at_punct("}") {
                self.advance();
                break;
            }
            if self.peek().kind == TokenKind::Eof {
                let found = Self::describe(self.peek());
                self.error_here(Code::P010, format!("expected '}}', found {found}"));
                break;
            }
            if self.at_keyword("Import") {
                if let Ok(decl) = self.import_decl() {
                    if let Err(e) = model.add_import(decl) {
                        self.diagnostics.push(Diagnostic::new(
                            Code::P014,
                            Some(self.prev_span()),
                            e.to_string(),
                        ));
                    }
                } else {
                    self.sync_to_element_boundary();
                }
                continue;
            }
            match self.element() {
                Ok(element) => {
                    if let Err(d) = model.push_element(element) {
                        self.diagnostics.push(d);
                    }
                }
                Err(Recover) => self.sync_to_element_boundary(),
            }
        }

        if self.peek().kind != TokenKind::Eof {
            let found = Self::describe(self.peek());
            self.error_here(Code::P010, format!("expected end of input, found {found}"));
        }
        Some(model)
    }

    fn import_decl(&mut self) -> Parsed<ImportDecl> {
        self.expect_keyword("Import")?;
        let target = self.qualified_name()?;
        let alias = if self.eat_keyword("as") {
            Some(self.expect_identifier("import alias")?.text)
        } else {
            None
        };
        ImportDecl::new(target, alias).map_err(|e| self.error_here(Code::P014, e.to_string()))
    }

    fn element(&mut self) -> Parsed<Element> {
        let t = self.peek().clone();
        let start = t.span.clone();
        let element = match (t.kind, t.text.as_str()) {
            (TokenKind::Keyword, "Actor") => self.actor()?,
            (TokenKind::Keyword, "DataEntity") => self.data_entity()?,
            (TokenKind::Keyword, "UseCase") => self.use_case()?,
            (TokenKind::Keyword, "UserStory") => self.user_story()?,
            (TokenKind::Keyword, "Goal") => self.goal()?,
            (TokenKind::Keyword, "QR") => self.quality_requirement()?,
            (TokenKind::Keyword, "TestCase") => self.test_case()?,
            (TokenKind::Keyword, "Term") => self.glossary_term()?,
            (TokenKind::Identifier, word) => {
                let msg = format!("unknown element keyword '{word}'");
                self.advance();
                return Err(self.error_here_at(Code::P011, start, msg));
            }
            _ => {
                let found = Self::describe(&t);
                return Err(self.error_here(Code::P010, format!("expected an element, found {found}")));
            }
        };
        Ok(element.with_span(start.merge(&self.prev_span())))
    }

    fn error_here_at(&mut self, code: Code, span: SourceSpan, message: String) -> Recover {
        self.diagnostics.push(Diagnostic::new(code, Some(span), message));
        Recover
    }

    fn actor(&mut self) -> Parsed<Element> {
        self.expect_keyword("Actor")?;
        let id = self.reference("actor identifier")?;
        let name = self.optional_name();
        self.expect_punct(":")?;
        let kind: ActorKind = self.vocab("actor kind")?;
        let mut description = None;
        if self.eat_punct("[") {
            description = self.optional_description()?;
            self.expect_punct("]")?;
        }
        let mut e = Element::new(id, ElementBody::Actor(Actor { kind }));
        if let Some(n) = name {
            e = e.with_name(n);
        }
        if let Some(d) = description {
            e = e.with_description(d);
        }
        Ok(e)
    }

    fn data_entity(&mut self) -> Parsed<Element> {
        self.expect_keyword("DataEntity")?;
        let id = self.reference("entity identifier")?;
        let name = self.optional_name();
        self.expect_punct(":")?;
        let kind: EntityKind = self.vocab("entity kind")?;
        self.expect_punct("[")?;
        let description = self.optional_description()?;
        let mut attributes = Vec::new();
        while self.at_keyword("attribute") {
            attributes.push(self.attribute()?);
        }
        self.expect_punct("]")?;
        let mut e = Element::new(id, ElementBody::DataEntity(DataEntity { kind, attributes }));
        if let Some(n) = name {
            e = e.with_name(n);
        }
        if let Some(d) = description {
            e = e.with_description(d);
        }
        Ok(e)
    }

    fn attribute(&mut self) -> Parsed<DataAttribute> {
        let start = self.peek().span.clone();
        self.expect_keyword("attribute")?;
        let name = self.reference("attribute name")?;
        self.expect_punct(":")?;
        let datatype: DataType = self.vocab("datatype")?;
        let mut constraints = Vec::new();
        if self.eat_keyword("constraints") {
            self.expect_punct("(")?;
            while !self.at_punct(")") {
                constraints.push(self.vocab::<AttrConstraint>("constraint")?);
            }
            self.expect_punct(")")?;
        }
        let references = if self.eat_keyword("references") {
            Some(self.reference("referenced entity")?)
        } else {
            None
        };
        let mut attr = DataAttribute::new(name, datatype, constraints, references);
        attr.span = Some(start.merge(&self.prev_span()));
        Ok(attr)
    }

    fn use_case(&mut self) -> Parsed<Element> {
        self.expect_keyword("UseCase")?;
        let id = self.reference("use case identifier")?;
        let name = self.optional_name();
        self.expect_punct(":")?;
        let kind: UseCaseKind = self.vocab("use case kind")?;
        self.expect_punct("[")?;
        let description = self.optional_description()?;
        let mut primary_actor = None;
        let mut data_entities = Vec::new();
        let mut scenarios: Vec<Scenario> = Vec::new();
        loop {
            if self.at_keyword("actorInitiates") {
                let kw = self.advance();
                if primary_actor.is_some() {
                    return Err(self.error_here_at(
                        Code::P013,
                        kw.span,
                        "'actorInitiates' given more than once".to_string(),
                    ));
                }
                primary_actor = Some(self.reference("actor reference")?);
            } else if self.at_keyword("dataEntity") {
                self.advance();
                data_entities.push(self.reference("entity reference")?);
                while self.eat_punct(",") {
                    data_entities.push(self.reference("entity reference")?);
                }
            } else if self.at_keyword("scenario") {
                scenarios.push(self.scenario()?);
            } else {
                break;
            }
        }
        self.expect_punct("]")?;
        let mut e = Element::new(
            id,
            ElementBody::UseCase(UseCase { kind, primary_actor, data_entities, scenarios }),
        );
        if let Some(n) = name {
            e = e.with_name(n);
        }
        if let Some(d) = description {
            e = e.with_description(d);
        }
        Ok(e)
    }

    fn scenario(&mut self) -> Parsed<Scenario> {
        let start = self.peek().span.clone();
        self.expect_keyword("scenario")?;
        let id = self.reference("scenario identifier")?;
        self.expect_punct(":")?;
        let kind: ScenarioKind = self.vocab("scenario kind")?;
        self.expect_punct("[")?;
        let mut steps = Vec::new();
        while self.at_keyword("step") {
            steps.push(self.step()?);
        }
        self.expect_punct("]")?;
        let mut s = Scenario::new(id, kind, steps);
        s.span = Some(start.merge(&self.prev_span()));
        Ok(s)
    }

    fn step(&mut self) -> Parsed<Step> {
        let start = self.peek().span.clone();
        self.expect_keyword("step")?;
        let order_tok = self.peek().clone();
        let order: u32 = if order_tok.kind == TokenKind::IntLiteral {
            self.advance();
            match order_tok.text.parse() {
                Ok(n) => n,
                Err(_) => {
                    return Err(self.error_here_at(
                        Code::P014,
                        order_tok.span,
                        format!("step order '{}' is out of range", order_tok.text),
                    ))
                }
            }
        } else {
            let found = Self::describe(&order_tok);
            return Err(self.error_here(Code::P010, format!("expected step order, found {found}")));
        };
        self.expect_punct(":")?;
        let performer = if self.eat_keyword("Actor") {
            Performer::Actor
        } else if self.peek().kind == TokenKind::Identifier && self.peek().text == "System" {
            self.advance();
            Performer::System
        } else {
            let err = ModelError::UnknownVocabularyTerm {
                term: self.peek().text.clone(),
                allowed: Performer::members(),
            };
            return Err(self.error_here(Code::P012, err.to_string()));
        };
        let action = self.expect_string("step action")?;
        let mut step = Step::new(order, performer, action)
            .map_err(|e| self.error_here_at(Code::P014, start.clone(), e.to_string()))?;
        step.span = Some(start.merge(&self.prev_span()));
        Ok(step)
    }

    fn user_story(&mut self) -> Parsed<Element> {
        self.expect_keyword("UserStory")?;
        let id = self.reference("user story identifier")?;
        let name = self.optional_name();
        self.expect_punct("[")?;
        let description = self.optional_description()?;
        self.expect_keyword("asA")?;
        let as_a = self.reference("actor reference")?;
        self.expect_keyword("iWant")?;
        let i_want = self.expect_string("iWant")?;
        if i_want.trim().is_empty() {
            return Err(self.error_here(Code::P014, "iWant text must not be empty"));
        }
        let so_that = if self.eat_keyword("soThat") {
            Some(self.expect_string("soThat")?).filter(|s| !s.is_empty())
        } else {
            None
        };
        let priority = if self.eat_keyword("priority") {
            self.vocab::<Priority>("priority")?
        } else {
            Priority::Unset
        };
        self.expect_punct("]")?;
        let mut e = Element::new(
            id,
            ElementBody::UserStory(UserStory { as_a, i_want, so_that, priority }),
        );
        if let Some(n) = name {
            e = e.with_name(n);
        }
        if let Some(d) = description {
            e = e.with_description(d);
        }
        Ok(e)
    }

    fn goal(&mut self) -> Parsed<Element> {
        self.expect_keyword("Goal")?;
        let id = self.reference("goal identifier")?;
        let name = self.optional_name();
        let mut description = None;
        let mut parent = None;
        let mut priority = Priority::Unset;
        if self.eat_punct("[") {
            description = self.optional_description()?;
            if self.eat_keyword("partOf") {
                parent = Some(self.reference("parent goal")?);
            }
            if self.eat_keyword("priority") {
                priority = self.vocab::<Priority>("priority")?;
            }
            self.expect_punct("]")?;
        }
        let mut e = Element::new(id, ElementBody::Goal(Goal { parent, priority }));
        if let Some(n) = name {
            e = e.with_name(n);
        }
        if let Some(d) = description {
            e = e.with_description(d);
        }
        Ok(e)
    }

    fn quality_requirement(&mut self) -> Parsed<Element> {
        self.expect_keyword("QR")?;
        let id = self.reference("quality requirement identifier")?;
        let name = self.optional_name();
        self.expect_punct(":")?;
        let kind: QrKind = self.vocab("quality requirement kind")?;
        let mut description = None;
        let mut metric = None;
        let mut target_value = None;
        if self.eat_punct("[") {
            description = self.optional_description()?;
            if self.eat_keyword("metric") {
                metric = Some(self.expect_string("metric")?).filter(|s| !s.is_empty());
            }
            if self.eat_keyword("value") {
                target_value = Some(self.expect_string("value")?).filter(|s| !s.is_empty());
            }
            self.expect_punct("]")?;
        }
        let mut e = Element::new(
            id,
            ElementBody::QualityRequirement(QualityRequirement { kind, metric, target_value }),
        );
        if let Some(n) = name {
            e = e.with_name(n);
        }
        if let Some(d) = description {
            e = e.with_description(d);
        }
        Ok(e)
    }

    fn test_case(&mut self) -> Parsed<Element> {
        self.expect_keyword("TestCase")?;
        let id = self.reference("test case identifier")?;
        let name = self.optional_name();
        self.expect_punct("[")?;
        let description = self.optional_description()?;
        self.expect_keyword("traces")?;
        let traces_to = self.reference("traced requirement")?;
        let scenario = if self.eat_keyword("scenario") {
            Some(self.reference("scenario reference")?)
        } else {
            None
        };
        let mut given = Vec::new();
        let mut when = Vec::new();
        let mut then = Vec::new();
        loop {
            if self.eat_keyword("given") {
                given.push(self.expect_string("given")?);
            } else if self.eat_keyword("when") {
                when.push(self.expect_string("when")?);
            } else if self.eat_keyword("then") {
                then.push(self.expect_string("then")?);
            } else {
                break;
            }
        }
        self.expect_punct("]")?;
        let mut e = Element::new(
            id,
            ElementBody::TestCase(TestCase { traces_to, scenario, given, when, then }),
        );
        if let Some(n) = name {
            e = e.with_name(n);
        }
        if let Some(d) = description {
            e = e.with_description(d);
        }
        Ok(e)
    }

    fn glossary_term(&mut self) -> Parsed<Element> {
        let start = self.peek().span.clone();
        self.expect_keyword("Term")?;
        let term = self.expect_string("term")?;
        self.expect_punct(":")?;
        let part_of_speech: PartOfSpeech = self.vocab("part of speech")?;
        let mut definition = None;
        let mut synonyms = Vec::new();
        let mut preferred = true;
        if self.eat_punct("[") {
            if self.eat_keyword("definition") {
                definition = Some(self.expect_string("definition")?).filter(|s| !s.is_empty());
            }
            while self.eat_keyword("synonym") {
                synonyms.push(self.expect_string("synonym")?);
            }
            if self.eat_keyword("notPreferred") {
                preferred = false;
            }
            self.expect_punct("]")?;
        }
        Element::glossary(term, part_of_speech, definition, synonyms, preferred)
            .map_err(|e| self.error_here_at(Code::P014, start, e.to_string()))
    }
}

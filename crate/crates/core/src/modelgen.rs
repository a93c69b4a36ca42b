//! Seeded pseudo-random model generator for the round-trip test corpus.
//!
//! The generator is deterministic: the same seed yields the same sequence
//! of models on every platform (ChaCha stream, no OS entropy). Generated
//! models satisfy all constructor invariants; unless
//! [`ModelGenerator::consistent_model`] is used they may still contain
//! dangling references, sparse step orders and similar validator-level
//! findings, which is exactly what round-trip tests must survive.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::model::*;

/// Seed of the committed corpus used by the acceptance round-trip suite.
pub const CORPUS_SEED: u64 = 0x5EED_CA7A;

const WORDS: &[&str] = &[
    "order", "invoice", "customer", "account", "archive", "payment", "delivery", "catalog",
    "report", "profile", "login", "records", "browse", "submit", "confirm", "update", "track",
    "review", "register", "export",
];

// Strings that exercise quoting and packing in every serializer.
const TRICKY: &[&str] = &["quo\"te", "back\\slash", "pi|pe", "com,ma", "line\nbreak", "(parens)"];

const SYNONYM_POOL: &[&str] = &["purchase", "client", "shipment", "statement", "entry", "item"];

pub struct ModelGenerator {
    rng: ChaCha8Rng,
}

impl ModelGenerator {
    pub fn new(seed: u64) -> Self {
        ModelGenerator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.gen_range(0..items.len())]
    }

    fn words(&mut self, min: usize, max: usize) -> String {
        let n = self.rng.gen_range(min..=max);
        let mut parts = Vec::with_capacity(n);
        for _ in 0..n {
            if self.chance(0.08) {
                parts.push(*self.pick(TRICKY));
            } else {
                parts.push(*self.pick(WORDS));
            }
        }
        parts.join(" ")
    }

    fn maybe_text(&mut self, p: f64) -> Option<String> {
        self.chance(p).then(|| self.words(1, 5))
    }

    fn priority(&mut self) -> Priority {
        *self.pick(Priority::ALL)
    }

    /// A corpus model: structurally valid, possibly inconsistent.
    pub fn model(&mut self) -> SpecificationModel {
        self.generate(false)
    }

    /// A model that passes `check_consistency` with zero errors.
    pub fn consistent_model(&mut self) -> SpecificationModel {
        self.generate(true)
    }

    fn generate(&mut self, consistent: bool) -> SpecificationModel {
        let mut counter = 0usize;
        let mut next = |prefix: &str, c: &mut usize| {
            *c += 1;
            Ident::new(format!("{prefix}_{c}")).unwrap()
        };

        let pkg_len = self.rng.gen_range(1..=3);
        let pkg: Vec<&str> = (0..pkg_len).map(|_| *self.pick(WORDS)).collect();
        let mut model = SpecificationModel::new(QualifiedName::parse(&pkg.join(".")).unwrap());

        for i in 0..self.rng.gen_range(0..=2u32) {
            let target = format!("{}.{}", self.pick(WORDS), self.pick(WORDS));
            let alias = self.chance(0.5).then(|| format!("al{i}"));
            model.add_import(ImportDecl::new(QualifiedName::parse(&target).unwrap(), alias).unwrap()).unwrap();
        }

        let mut actors: Vec<Ident> = Vec::new();
        let mut entities: Vec<Ident> = Vec::new();
        let mut use_cases: Vec<(Ident, Vec<Ident>)> = Vec::new();
        let mut stories: Vec<Ident> = Vec::new();
        let mut goals: Vec<Ident> = Vec::new();

        if consistent {
            // Seed reference targets so later elements can stay resolvable.
            for _ in 0..self.rng.gen_range(1..=2) {
                let id = next("a", &mut counter);
                actors.push(id.clone());
                let e = Element::new(id, ElementBody::Actor(Actor { kind: *self.pick(ActorKind::ALL) }));
                model.push_element(e).unwrap();
            }
        }

        let element_count = self.rng.gen_range(0..=9usize);
        for _ in 0..element_count {
            let mut roll = self.rng.gen_range(0..8u32);
            if roll == 6 && consistent && use_cases.is_empty() && stories.is_empty() {
                // A test case would have nothing valid to trace.
                roll = 5;
            }
            let element = match roll {
                0 => {
                    let id = next("a", &mut counter);
                    actors.push(id.clone());
                    Element::new(id, ElementBody::Actor(Actor { kind: *self.pick(ActorKind::ALL) }))
                }
                1 => {
                    let id = next("e", &mut counter);
                    let attrs = self.attributes(&mut counter, &entities, consistent);
                    entities.push(id.clone());
                    Element::new(
                        id,
                        ElementBody::DataEntity(DataEntity {
                            kind: *self.pick(EntityKind::ALL),
                            attributes: attrs,
                        }),
                    )
                }
                2 => {
                    let id = next("uc", &mut counter);
                    let (uc, scenario_ids) = self.use_case(&mut counter, &actors, &entities, consistent);
                    use_cases.push((id.clone(), scenario_ids));
                    Element::new(id, ElementBody::UseCase(uc))
                }
                3 => {
                    let id = next("us", &mut counter);
                    let as_a = self.actor_ref(&mut counter, &actors, consistent);
                    stories.push(id.clone());
                    Element::new(
                        id,
                        ElementBody::UserStory(UserStory {
                            as_a,
                            i_want: self.words(1, 6),
                            so_that: self.maybe_text(0.6),
                            priority: self.priority(),
                        }),
                    )
                }
                4 => {
                    let id = next("g", &mut counter);
                    let parent = if !goals.is_empty() && self.chance(0.4) {
                        Some(self.pick(&goals).clone())
                    } else if !consistent && self.chance(0.1) {
                        Some(next("missing_g", &mut counter))
                    } else {
                        None
                    };
                    goals.push(id.clone());
                    Element::new(id, ElementBody::Goal(Goal { parent, priority: self.priority() }))
                }
                5 => {
                    let id = next("qr", &mut counter);
                    Element::new(
                        id,
                        ElementBody::QualityRequirement(QualityRequirement {
                            kind: *self.pick(QrKind::ALL),
                            metric: self.maybe_text(0.5),
                            target_value: self.maybe_text(0.5),
                        }),
                    )
                }
                6 => {
                    let id = next("tc", &mut counter);
                    Element::new(id, ElementBody::TestCase(self.test_case(&mut counter, &use_cases, &stories, consistent)))
                }
                _ => {
                    counter += 1;
                    let term = format!("{} {counter}", self.pick(WORDS));
                    let synonyms: Vec<String> = (0..self.rng.gen_range(0..=2usize))
                        .map(|i| format!("{} {counter}x{i}", self.pick(SYNONYM_POOL)))
                        .collect();
                    Element::glossary(
                        term,
                        *self.pick(PartOfSpeech::ALL),
                        self.maybe_text(0.5),
                        synonyms,
                        self.chance(0.8),
                    )
                    .unwrap()
                }
            };
            let element = match self.maybe_text(0.4) {
                Some(name) => element.with_name(name),
                None => element,
            };
            let element = match self.maybe_text(0.35) {
                Some(d) => element.with_description(d),
                None => element,
            };
            model.push_element(element).unwrap();
        }
        model
    }

    fn attributes(
        &mut self,
        counter: &mut usize,
        entities: &[Ident],
        consistent: bool,
    ) -> Vec<DataAttribute> {
        let n = self.rng.gen_range(0..=4usize);
        let mut pk_given = false;
        (0..n)
            .map(|i| {
                let mut constraints = Vec::new();
                if !pk_given && self.chance(0.3) {
                    constraints.push(AttrConstraint::PrimaryKey);
                    pk_given = true;
                }
                if self.chance(0.3) {
                    constraints.push(AttrConstraint::NotNull);
                }
                if self.chance(0.15) {
                    constraints.push(AttrConstraint::Unique);
                }
                let wants_fk = self.chance(0.3);
                let references = if wants_fk && !entities.is_empty() {
                    Some(self.pick(entities).clone())
                } else if wants_fk && !consistent && self.chance(0.3) {
                    *counter += 1;
                    Some(Ident::new(format!("missing_e_{counter}")).unwrap())
                } else {
                    None
                };
                let datatype = if references.is_some() && consistent {
                    if self.chance(0.7) {
                        DataType::Integer
                    } else {
                        DataType::Text
                    }
                } else {
                    *self.pick(DataType::ALL)
                };
                *counter += 1;
                DataAttribute::new(
                    Ident::new(format!("attr_{i}_{counter}")).unwrap(),
                    datatype,
                    constraints,
                    references,
                )
            })
            .collect()
    }

    fn actor_ref(&mut self, counter: &mut usize, actors: &[Ident], consistent: bool) -> Ident {
        if !actors.is_empty() && (consistent || self.chance(0.8)) {
            self.pick(actors).clone()
        } else {
            *counter += 1;
            Ident::new(format!("ghost_a_{counter}")).unwrap()
        }
    }

    fn use_case(
        &mut self,
        counter: &mut usize,
        actors: &[Ident],
        entities: &[Ident],
        consistent: bool,
    ) -> (UseCase, Vec<Ident>) {
        let primary_actor = if self.chance(0.75) {
            if !actors.is_empty() && (consistent || self.chance(0.85)) {
                Some(self.pick(actors).clone())
            } else if consistent {
                None
            } else {
                *counter += 1;
                Some(Ident::new(format!("ghost_a_{counter}")).unwrap())
            }
        } else {
            None
        };
        let mut data_entities = Vec::new();
        for _ in 0..self.rng.gen_range(0..=2usize) {
            if !entities.is_empty() && (consistent || self.chance(0.8)) {
                let e = self.pick(entities).clone();
                if !data_entities.contains(&e) {
                    data_entities.push(e);
                }
            } else if !consistent {
                *counter += 1;
                data_entities.push(Ident::new(format!("ghost_e_{counter}")).unwrap());
            }
        }
        let mut scenario_ids = Vec::new();
        let mut scenarios = Vec::new();
        let scenario_count = self.rng.gen_range(0..=3usize);
        for s in 0..scenario_count {
            *counter += 1;
            let id = Ident::new(format!("s_{counter}")).unwrap();
            scenario_ids.push(id.clone());
            let kind = if consistent {
                if s == 0 {
                    ScenarioKind::Main
                } else {
                    *self.pick(&[ScenarioKind::Alternative, ScenarioKind::Exception])
                }
            } else {
                *self.pick(ScenarioKind::ALL)
            };
            let mut steps = Vec::new();
            let mut order = 0u32;
            for _ in 0..self.rng.gen_range(0..=4usize) {
                // Sparse but ascending orders; canonicalize squeezes them.
                order += self.rng.gen_range(1..=3u32);
                steps.push(
                    Step::new(order, *self.pick(Performer::ALL), self.words(1, 6)).unwrap(),
                );
            }
            scenarios.push(Scenario::new(id, kind, steps));
        }
        (
            UseCase { kind: *self.pick(UseCaseKind::ALL), primary_actor, data_entities, scenarios },
            scenario_ids,
        )
    }

    fn test_case(
        &mut self,
        counter: &mut usize,
        use_cases: &[(Ident, Vec<Ident>)],
        stories: &[Ident],
        consistent: bool,
    ) -> TestCase {
        let (traces_to, scenario) = if !use_cases.is_empty() && self.chance(0.6) {
            let (uc, scenarios) = self.pick(use_cases);
            let scenario = (!scenarios.is_empty() && self.chance(0.6))
                .then(|| self.pick(scenarios).clone());
            (uc.clone(), scenario)
        } else if !stories.is_empty() && (consistent || self.chance(0.7)) {
            (self.pick(stories).clone(), None)
        } else if consistent {
            match (use_cases.first(), stories.first()) {
                (Some((uc, _)), _) => (uc.clone(), None),
                (None, Some(us)) => (us.clone(), None),
                (None, None) => unreachable!("caller guarantees a traceable element exists"),
            }
        } else {
            *counter += 1;
            (Ident::new(format!("ghost_uc_{counter}")).unwrap(), None)
        };
        let mut lists = || -> Vec<String> {
            (0..self.rng.gen_range(0..=3usize)).map(|_| self.words(1, 5)).collect()
        };
        TestCase { traces_to, scenario, given: lists(), when: lists(), then: lists() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let mut a = ModelGenerator::new(7);
        let mut b = ModelGenerator::new(7);
        for _ in 0..20 {
            assert_eq!(a.model(), b.model());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = ModelGenerator::new(1);
        let mut b = ModelGenerator::new(2);
        let distinct = (0..10).any(|_| a.model() != b.model());
        assert!(distinct);
    }

    #[test]
    fn corpus_covers_every_element_kind() {
        let mut gen = ModelGenerator::new(CORPUS_SEED);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..200 {
            for e in gen.model().elements {
                seen.insert(e.kind());
            }
        }
        assert_eq!(seen.len(), ElementKind::ALL.len());
    }

    #[test]
    fn consistent_models_have_zero_consistency_errors() {
        let mut gen = ModelGenerator::new(11);
        for _ in 0..100 {
            let m = gen.consistent_model();
            let diags = crate::validate::check_consistency(&m);
            assert!(diags.is_empty(), "unexpected diagnostics: {diags:?}\nmodel: {m:#?}");
        }
    }
}

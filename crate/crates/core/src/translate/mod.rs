//! Question to query translation.
//!
//! A [`QueryGenerator`] turns a question into a validated query. Two are
//! provided and registered by name in a [`GeneratorRegistry`]: `template`
//! ([`TemplateGenerator`], rule-based classification plus per-intent query
//! templates) and `external` ([`external::ExternalGenerator`], an HTTP
//! backend whose output is parsed, bound and checked against the schema
//! before it can be executed).

pub mod external;
pub mod intent;
pub mod lexicon;
pub mod templates;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use external::ExternalGenerator;
pub use intent::{classify, CompanyRef, Metric, QuestionIntent, ScreenAnchor, ScreenPredicate, SectorRef};
pub use lexicon::Lexicon;
pub use templates::{QueryTemplate, TemplateRegistry};

use crate::cypher::ast::{Clause, Expr, Pattern, Query};
use crate::cypher::{self};
use crate::schema::SchemaCatalog;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("unsupported question: {0}")]
    Unsupported(String),
    #[error("entity not found: {0}")]
    EntityNotFound(String),
    #[error("ambiguous entity: {0}")]
    AmbiguousEntity(String),
    #[error("no query template for intent {0}")]
    TemplateGap(String),
    #[error("generated query rejected: {0}")]
    GeneratedQueryInvalid(String),
    #[error("query backend unreachable: {0}")]
    BackendUnreachable(String),
    #[error("query backend timed out after {0} s")]
    Timeout(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationResult {
    pub intent: QuestionIntent,
    pub query_text: String,
    #[serde(skip)]
    pub ast: Query,
    pub notes: Vec<String>,
    /// Name of the generator that produced the query.
    pub generator: String,
}

fn pattern_problems(p: &Pattern, catalog: &SchemaCatalog, out: &mut Vec<String>) {
    for n in p.nodes() {
        for l in &n.labels {
            if catalog.node_type(l).is_none() {
                out.push(format!("unknown label {l}"));
            }
        }
        for (key, _) in &n.props {
            let known = if n.labels.is_empty() {
                catalog.has_property(key)
            } else {
                n.labels
                    .iter()
                    .filter_map(|l| catalog.node_type(l))
                    .any(|t| t.property(key).is_some())
            };
            if !known {
                out.push(format!("unknown property {key}"));
            }
        }
    }
    for r in p.rels() {
        for t in &r.types {
            if catalog.rel_type(t).is_none() {
                out.push(format!("unknown relationship type {t}"));
            }
        }
    }
}

fn expr_problems(e: &Expr, catalog: &SchemaCatalog, out: &mut Vec<String>) {
    let mut keys = Vec::new();
    e.property_keys(&mut keys);
    for k in keys {
        if !catalog.has_property(&k) {
            out.push(format!("unknown property {k}"));
        }
    }
}

/// Checks that a query names only catalog labels, relationship types and
/// property keys.
pub fn validate_query(query: &Query, catalog: &SchemaCatalog) -> Result<(), Vec<String>> {
    let mut out = Vec::new();
    for clause in &query.clauses {
        match clause {
            Clause::Match(m) => {
                for p in &m.patterns {
                    pattern_problems(p, catalog, &mut out);
                }
                if let Some(w) = &m.predicate {
                    expr_problems(w, catalog, &mut out);
                }
            }
            Clause::With(w) => {
                for i in &w.items {
                    expr_problems(&i.expr, catalog, &mut out);
                }
                if let Some(p) = &w.predicate {
                    expr_problems(p, catalog, &mut out);
                }
            }
            Clause::Return(r) => {
                for i in &r.items {
                    expr_problems(&i.expr, catalog, &mut out);
                }
            }
            Clause::OrderBy(keys) => {
                for k in keys {
                    expr_problems(&k.expr, catalog, &mut out);
                }
            }
        }
    }
    out.dedup();
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Parses, binds and schema-checks query text.
pub fn check_query(text: &str, catalog: &SchemaCatalog) -> Result<Query, TranslateError> {
    let ast = cypher::parse(text).map_err(|e| {
        let p = e.position();
        TranslateError::GeneratedQueryInvalid(format!("line {}, column {}: {e}", p.line, p.column))
    })?;
    validate_query(&ast, catalog).map_err(|v| TranslateError::GeneratedQueryInvalid(v.join("; ")))?;
    Ok(ast)
}

fn resolved(intent: &QuestionIntent, lexicon: &Lexicon) -> Result<QuestionIntent, TranslateError> {
    let fill = |r: &CompanyRef| -> Result<CompanyRef, TranslateError> {
        let id = templates::resolve_company(r, lexicon)?;
        Ok(CompanyRef {
            resolved_id: Some(id),
            ..r.clone()
        })
    };
    Ok(match intent {
        QuestionIntent::CompetitorFinancialComparison {
            anchor,
            competitors,
            years,
            metrics,
        } => QuestionIntent::CompetitorFinancialComparison {
            anchor: fill(anchor)?,
            competitors: competitors.iter().map(fill).collect::<Result<_, _>>()?,
            years: years.clone(),
            metrics: metrics.clone(),
        },
        QuestionIntent::SectorIndicatorScreen {
            anchor,
            years,
            predicate,
        } => QuestionIntent::SectorIndicatorScreen {
            anchor: match anchor {
                ScreenAnchor::Company(c) => ScreenAnchor::Company(fill(c)?),
                ScreenAnchor::Sector(s) => ScreenAnchor::Sector(SectorRef {
                    resolved_id: Some(templates::resolve_sector(s, lexicon)?),
                    ..s.clone()
                }),
            },
            years: years.clone(),
            predicate: *predicate,
        },
        QuestionIntent::PriceLookup { company, date } => QuestionIntent::PriceLookup {
            company: fill(company)?,
            date: date.clone(),
        },
        QuestionIntent::Unsupported { reason } => return Err(TranslateError::Unsupported(reason.clone())),
    })
}

/// Instantiates the intent's template and validates the result.
pub fn translate_with(
    intent: &QuestionIntent,
    lexicon: &Lexicon,
    catalog: &SchemaCatalog,
    templates: &TemplateRegistry,
) -> Result<TranslationResult, TranslateError> {
    let intent = resolved(intent, lexicon)?;
    let template = templates
        .get(intent.name())
        .ok_or_else(|| TranslateError::TemplateGap(intent.name().into()))?;
    let (query_text, notes) = template.instantiate(&intent, lexicon)?;
    let ast = check_query(&query_text, catalog)?;
    Ok(TranslationResult {
        intent,
        query_text,
        ast,
        notes,
        generator: TemplateGenerator::NAME.into(),
    })
}

pub fn translate(
    intent: &QuestionIntent,
    lexicon: &Lexicon,
    catalog: &SchemaCatalog,
) -> Result<TranslationResult, TranslateError> {
    translate_with(intent, lexicon, catalog, &TemplateRegistry::default())
}

/// What a generator may consult.
pub struct GenerationContext<'a> {
    pub catalog: &'a SchemaCatalog,
    pub lexicon: &'a Lexicon,
    pub templates: &'a TemplateRegistry,
}

pub trait QueryGenerator: Send + Sync {
    fn name(&self) -> &str;
    fn generate(&self, question: &str, ctx: &GenerationContext) -> Result<TranslationResult, TranslateError>;
}

/// Rule-based classification followed by template instantiation.
pub struct TemplateGenerator;

impl TemplateGenerator {
    pub const NAME: &'static str = "template";
}

impl QueryGenerator for TemplateGenerator {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn generate(&self, question: &str, ctx: &GenerationContext) -> Result<TranslationResult, TranslateError> {
        let intent = classify(question, ctx.lexicon);
        translate_with(&intent, ctx.lexicon, ctx.catalog, ctx.templates)
    }
}

/// Generators keyed by name.
#[derive(Clone, Default)]
pub struct GeneratorRegistry {
    generators: BTreeMap<String, Arc<dyn QueryGenerator>>,
}

impl GeneratorRegistry {
    /// A registry holding only the template generator.
    pub fn with_defaults() -> Self {
        let mut r = GeneratorRegistry::default();
        r.register(Arc::new(TemplateGenerator));
        r
    }

    pub fn register(&mut self, g: Arc<dyn QueryGenerator>) {
        self.generators.insert(g.name().to_string(), g);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn QueryGenerator>> {
        self.generators.get(name).cloned()
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.keys().cloned().collect()
    }
}

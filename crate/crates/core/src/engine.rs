//! Read-side facade over one immutable graph.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::answer::{compose_with, AnswerReport, ComposeError, SummarizerRegistry};
use crate::cypher::{self, CypherError};
use crate::exec::{execute, ResultTable};
use crate::graph::PropertyGraph;
use crate::schema::SchemaCatalog;
use crate::translate::{
    GenerationContext, GeneratorRegistry, Lexicon, QueryGenerator, TemplateGenerator, TemplateRegistry, TranslateError,
    TranslationResult,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Cypher(#[from] CypherError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error("no query generator named {0}")]
    UnknownGenerator(String),
}

impl EngineError {
    /// Backend failures, including unusable backend output, are system
    /// errors; everything else is the caller's.
    pub fn is_user_error(&self) -> bool {
        !matches!(
            self,
            EngineError::Translate(
                TranslateError::BackendUnreachable(_)
                    | TranslateError::Timeout(_)
                    | TranslateError::GeneratedQueryInvalid(_)
            )
        )
    }
}

#[derive(Debug, Clone)]
pub struct AskOptions {
    pub generator: String,
    /// Retry with the template generator when the chosen generator's backend
    /// is unreachable or times out.
    pub fallback: bool,
}

impl Default for AskOptions {
    fn default() -> Self {
        AskOptions {
            generator: TemplateGenerator::NAME.into(),
            fallback: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Answer {
    pub translation: TranslationResult,
    #[serde(skip)]
    pub table: ResultTable,
    pub report: AnswerReport,
}

pub struct Engine {
    graph: Arc<PropertyGraph>,
    catalog: SchemaCatalog,
    lexicon: Lexicon,
    generators: GeneratorRegistry,
    templates: TemplateRegistry,
    summarizers: SummarizerRegistry,
    executed: AtomicUsize,
}

impl Engine {
    pub fn new(graph: PropertyGraph) -> Self {
        Engine::from_arc(Arc::new(graph))
    }

    pub fn from_arc(graph: Arc<PropertyGraph>) -> Self {
        let lexicon = Lexicon::from_graph(&graph);
        Engine {
            graph,
            catalog: SchemaCatalog::market(),
            lexicon,
            generators: GeneratorRegistry::with_defaults(),
            templates: TemplateRegistry::default(),
            summarizers: SummarizerRegistry::default(),
            executed: AtomicUsize::new(0),
        }
    }

    pub fn with_generator(mut self, g: Arc<dyn QueryGenerator>) -> Self {
        self.generators.register(g);
        self
    }

    pub fn graph(&self) -> &PropertyGraph {
        &self.graph
    }

    pub fn catalog(&self) -> &SchemaCatalog {
        &self.catalog
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn generators(&self) -> &GeneratorRegistry {
        &self.generators
    }

    /// Number of queries handed to the executor so far.
    pub fn executed_queries(&self) -> usize {
        self.executed.load(Ordering::Relaxed)
    }

    fn run(&self, ast: &cypher::ast::Query) -> ResultTable {
        self.executed.fetch_add(1, Ordering::Relaxed);
        execute(&self.graph, ast)
    }

    pub fn query(&self, text: &str) -> Result<ResultTable, EngineError> {
        let ast = cypher::parse(text)?;
        Ok(self.run(&ast))
    }

    pub fn translate(&self, question: &str, generator: &str) -> Result<TranslationResult, EngineError> {
        let g = self
            .generators
            .get(generator)
            .ok_or_else(|| EngineError::UnknownGenerator(generator.into()))?;
        let ctx = GenerationContext {
            catalog: &self.catalog,
            lexicon: &self.lexicon,
            templates: &self.templates,
        };
        Ok(g.generate(question, &ctx)?)
    }

    /// Translate, execute and compose.
    pub fn ask(&self, question: &str, opts: &AskOptions) -> Result<Answer, EngineError> {
        let translation = match self.translate(question, &opts.generator) {
            Err(EngineError::Translate(e @ (TranslateError::BackendUnreachable(_) | TranslateError::Timeout(_))))
                if opts.fallback && opts.generator != TemplateGenerator::NAME =>
            {
                tracing::warn!("{e}; falling back to the template generator");
                let mut t = self.translate(question, TemplateGenerator::NAME)?;
                t.notes.push(format!(
                    "{} generator failed ({e}); template used instead",
                    opts.generator
                ));
                t
            }
            other => other?,
        };
        let table = self.run(&translation.ast);
        let report = compose_with(question, &translation, &table, &self.summarizers)?;
        Ok(Answer {
            translation,
            table,
            report,
        })
    }
}

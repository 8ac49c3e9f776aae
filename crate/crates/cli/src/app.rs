//! Operations shared by the command line, the REPL and the HTTP service.

use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value as Json};
use stockgraph::cypher::{CypherError, Position};
use stockgraph::engine::{Answer, AskOptions, Engine, EngineError};
use stockgraph::exec::ResultTable;
use stockgraph::graph::{self, PropertyGraph};
use stockgraph::translate::{ExternalGenerator, TranslateError};
use thiserror::Error;

use crate::config::{AppConfig, Backend};

#[derive(Debug, Error)]
pub enum AppError {
    /// Bad input: query syntax, unknown entities, unsupported questions.
    #[error("{message}")]
    User {
        message: String,
        position: Option<Position>,
    },
    #[error("{0}")]
    Timeout(String),
    #[error("{0}")]
    System(String),
}

impl AppError {
    pub fn system(e: impl std::fmt::Display) -> Self {
        AppError::System(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::User { .. } => 1,
            AppError::Timeout(_) | AppError::System(_) => 2,
        }
    }

    /// Body for error responses and `--output json` diagnostics.
    pub fn to_json(&self) -> Json {
        let kind = match self {
            AppError::User { .. } => "user",
            AppError::Timeout(_) => "timeout",
            AppError::System(_) => "system",
        };
        let mut body = json!({ "error": self.to_string(), "kind": kind });
        if let AppError::User { position: Some(p), .. } = self {
            body["position"] = json!({ "line": p.line, "column": p.column, "offset": p.offset });
        }
        body
    }
}

impl From<CypherError> for AppError {
    fn from(e: CypherError) -> Self {
        AppError::User {
            position: Some(e.position()),
            message: e.to_string(),
        }
    }
}

impl From<EngineError> for AppError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Cypher(c) => c.into(),
            EngineError::Translate(TranslateError::Timeout(_)) => AppError::Timeout(e.to_string()),
            e if e.is_user_error() => AppError::User {
                message: e.to_string(),
                position: None,
            },
            e => AppError::System(e.to_string()),
        }
    }
}

/// A loaded snapshot plus the ask settings derived from configuration.
pub struct App {
    engine: Engine,
    ask: AskOptions,
}

impl App {
    pub fn new(graph: PropertyGraph, backend: &Backend) -> Self {
        let mut engine = Engine::new(graph);
        let mut ask = AskOptions::default();
        if let Backend::External {
            url,
            timeout_s,
            fallback,
        } = backend
        {
            engine = engine.with_generator(Arc::new(ExternalGenerator::new(url, *timeout_s)));
            ask.generator = ExternalGenerator::NAME.into();
            ask.fallback = *fallback;
        }
        App { engine, ask }
    }

    pub fn open(cfg: &AppConfig) -> Result<Self, AppError> {
        Ok(App::new(load_snapshot(&cfg.snapshot_path)?, &cfg.backend))
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn graph(&self) -> &PropertyGraph {
        self.engine.graph()
    }

    pub fn query(&self, cypher: &str) -> Result<ResultTable, AppError> {
        Ok(self.engine.query(cypher)?)
    }

    /// Asks with the configured generator, or `generator` when given.
    pub fn ask(&self, question: &str, generator: Option<&str>) -> Result<Answer, AppError> {
        let mut opts = self.ask.clone();
        if let Some(g) = generator {
            opts.generator = g.into();
        }
        Ok(self.engine.ask(question, &opts)?)
    }

    pub fn query_json(&self, cypher: &str) -> Result<Json, AppError> {
        Ok(self.query(cypher)?.to_json())
    }

    pub fn ask_json(&self, question: &str) -> Result<Json, AppError> {
        Ok(self.ask(question, None)?.report.to_json())
    }

    pub fn health_json(&self) -> Json {
        let g = self.graph();
        json!({ "status": "ok", "nodes": g.node_count(), "edges": g.edge_count() })
    }

    pub fn schema_json(&self) -> Json {
        self.engine.catalog().to_json()
    }

    pub fn stats_json(&self) -> Json {
        serde_json::to_value(self.graph().stats()).expect("stats serialize")
    }
}

pub fn load_snapshot(path: &Path) -> Result<PropertyGraph, AppError> {
    if !path.exists() {
        return Err(AppError::System(format!(
            "no snapshot at {}; run `stockgraph ingest` first",
            path.display()
        )));
    }
    graph::load(path).map_err(AppError::system)
}

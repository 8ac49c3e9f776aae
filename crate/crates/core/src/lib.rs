//! Embedded stock-market knowledge graph.
//!
//! The crate is organised as a pipeline: [`ingest`] builds a
//! [`graph::PropertyGraph`] validated against [`schema`]; queries in the
//! supported Cypher subset are parsed by [`cypher`] and evaluated by
//! [`exec`]; [`translate`] turns questions into queries and [`answer`] turns
//! result tables into reports. [`engine::Engine`] ties the read side together.

pub mod answer;
pub mod cypher;
pub mod engine;
pub mod exec;
pub mod graph;
pub mod ingest;
pub mod schema;
pub mod translate;
pub mod value;

pub use value::{Props, Value};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Cypher(#[from] cypher::CypherError),
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
}

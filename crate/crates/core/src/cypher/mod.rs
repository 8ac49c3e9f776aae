//! The Cypher subset: lexer, parser, binder and canonical renderer.
//!
//! Supported clauses are `MATCH`, `OPTIONAL MATCH`, `WHERE`, `WITH`,
//! `RETURN` and `ORDER BY`. The grammar is written out in `docs/grammar.md`.

pub mod ast;
mod binder;
mod lexer;
mod parser;
pub mod render;

use std::fmt;

use thiserror::Error;

pub use ast::Query;
pub use binder::{bind, VarKind};
pub use lexer::{tokenize, Spanned, Token};
pub use parser::parse_unbound;
pub use render::{render, render_expr};

/// Source position; `line` and `column` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at {pos} near {snippet:?}")]
pub struct LexError {
    pub pos: Position,
    pub snippet: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("unexpected {found} at {pos}; expected {}", expected.join(" or "))]
pub struct ParseError {
    pub pos: Position,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message}: `{variable}` at {pos}")]
pub struct BindError {
    pub variable: String,
    pub pos: Position,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CypherError {
    #[error("lex error: {0}")]
    Lex(#[from] LexError),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("bind error: {0}")]
    Bind(#[from] BindError),
}

impl CypherError {
    pub fn position(&self) -> Position {
        match self {
            CypherError::Lex(e) => e.pos,
            CypherError::Parse(e) => e.pos,
            CypherError::Bind(e) => e.pos,
        }
    }
}

/// Parses and binds a query.
pub fn parse(text: &str) -> Result<Query, CypherError> {
    let (query, tokens, clause_starts) = parser::parse_with_tokens(text)?;
    if let Err(fault) = bind(&query) {
        let pos = locate(&tokens, &clause_starts, fault.clause, &fault.variable);
        return Err(BindError {
            variable: fault.variable,
            pos,
            message: fault.message,
        }
        .into());
    }
    Ok(query)
}

// Best-effort: first use of `var` as a variable within the failing clause.
fn locate(tokens: &[Spanned], clause_starts: &[usize], clause: usize, var: &str) -> Position {
    let start = clause_starts.get(clause).copied().unwrap_or(0);
    let end = clause_starts.get(clause + 1).copied().unwrap_or(tokens.len());
    for i in start..end {
        if let Token::Ident(name) = &tokens[i].token {
            let prev = i.checked_sub(1).map(|j| &tokens[j].token);
            if name == var && !matches!(prev, Some(Token::Dot | Token::Colon | Token::Pipe | Token::As)) {
                return tokens[i].pos;
            }
        }
    }
    tokens.get(start).map(|t| t.pos).unwrap_or_default()
}

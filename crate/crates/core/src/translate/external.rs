//! HTTP query backend.
//!
//! Request: `POST <url>` with JSON `{"schema": .., "question": .., "rules": ..}`.
//! Reply: JSON `{"query": ".."}`. The returned text must parse, bind and name
//! only catalog labels, relationship types and properties; otherwise the
//! generation fails with [`TranslateError::GeneratedQueryInvalid`] and
//! nothing is executed.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{check_query, classify, GenerationContext, QueryGenerator, TranslateError, TranslationResult};

/// Rules sent to the backend alongside the schema.
pub const RULES_TEXT: &str = "\
Write one read-only query in the supported subset: MATCH, OPTIONAL MATCH, WHERE, WITH, RETURN, ORDER BY.
Use only the node labels, relationship types and property names listed in the schema.
Strings use double quotes. Dates are text in YYYYMMDD form; Date.year, Quarter.year and Year.year are integers.
Anchor companies by stock_code when the question gives one, otherwise by stock_abbrv.
Filter years with `y.year IN [..]` on a Year or Date node and order yearly results by year ascending.
Give every returned expression an alias.
Reply with JSON {\"query\": \"...\"} and nothing else.";

pub const DEFAULT_TIMEOUT_S: u64 = 30;

#[derive(Serialize)]
struct Request<'a> {
    schema: &'a str,
    question: &'a str,
    rules: &'a str,
}

#[derive(Deserialize)]
struct Reply {
    query: String,
}

pub struct ExternalGenerator {
    url: String,
    timeout: Duration,
    agent: ureq::Agent,
}

impl ExternalGenerator {
    pub const NAME: &'static str = "external";

    pub fn new(url: &str, timeout_s: u64) -> Self {
        let timeout = Duration::from_secs(timeout_s.max(1));
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(true)
            .build()
            .into();
        ExternalGenerator {
            url: url.to_string(),
            timeout,
            agent,
        }
    }

    /// Sends the request and returns the raw query text.
    pub fn fetch(&self, question: &str, schema_text: &str) -> Result<String, TranslateError> {
        let body = Request {
            schema: schema_text,
            question,
            rules: RULES_TEXT,
        };
        let response = self
            .agent
            .post(&self.url)
            .send_json(&body)
            .map_err(|e| self.map_err(e))?;
        let reply: Reply = response.into_body().read_json().map_err(|e| match e {
            ureq::Error::Timeout(_) => TranslateError::Timeout(self.timeout.as_secs()),
            other => TranslateError::GeneratedQueryInvalid(format!("reply is not {{\"query\": ..}}: {other}")),
        })?;
        Ok(reply.query)
    }

    fn map_err(&self, e: ureq::Error) -> TranslateError {
        match e {
            ureq::Error::Timeout(_) => TranslateError::Timeout(self.timeout.as_secs()),
            ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => {
                TranslateError::Timeout(self.timeout.as_secs())
            }
            other => TranslateError::BackendUnreachable(format!("{}: {other}", self.url)),
        }
    }
}

impl QueryGenerator for ExternalGenerator {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn generate(&self, question: &str, ctx: &GenerationContext) -> Result<TranslationResult, TranslateError> {
        let query_text = self.fetch(question, &ctx.catalog.schema_text())?;
        let ast = check_query(&query_text, ctx.catalog)?;
        Ok(TranslationResult {
            intent: classify(question, ctx.lexicon),
            query_text,
            ast,
            notes: vec![format!("query produced by the backend at {}", self.url)],
            generator: Self::NAME.into(),
        })
    }
}

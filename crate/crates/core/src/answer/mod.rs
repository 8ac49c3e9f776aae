//! Answer composition.
//!
//! [`compose`] turns a question, its translation and the executed result
//! table into an [`AnswerReport`]: ordered sections of fixed-template
//! narrative, each with the table slice its numbers come from, plus the
//! provenance of the query. Summarizers are registered per intent name in a
//! [`SummarizerRegistry`].

pub mod comparison;
pub mod format;
pub mod screen;
pub mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use comparison::{summarize_comparison, trend_stats, yoy, TrendStat};
pub use screen::{bucket_of, classify_screen, summarize_screen, Bucket, Evidence, ScreenClassification};
pub use stats::{sector_stats, Baseline};

use crate::exec::{Cell, ResultTable};
use crate::translate::{QuestionIntent, TranslationResult};
use format::{currency, number_tokens};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("result table is missing columns: {}", .0.join(", "))]
    MissingColumns(Vec<String>),
    #[error("result table has an unexpected shape: {0}")]
    ShapeMismatch(String),
}

/// Rendered table cells backing a section's narrative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct TableSlice {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TableSlice {
    /// Every cell of a result table in display form.
    pub fn of(table: &ResultTable) -> Self {
        TableSlice {
            columns: table.columns.clone(),
            rows: table
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::display).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub heading: String,
    pub narrative: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<TableSlice>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub query: String,
    pub rows: usize,
    pub generator: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnswerReport {
    pub question: String,
    pub intent: QuestionIntent,
    pub sections: Vec<Section>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classifications: Option<Vec<ScreenClassification>>,
    pub provenance: Provenance,
    pub footer: Vec<String>,
}

/// Output of one summarizer, before provenance is attached.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub sections: Vec<Section>,
    pub classifications: Option<Vec<ScreenClassification>>,
    pub footer: Vec<String>,
}

pub trait Summarizer: Send + Sync {
    /// Intent name this summarizer handles, as in [`QuestionIntent::name`].
    fn intent(&self) -> &str;
    fn summarize(&self, intent: &QuestionIntent, table: &ResultTable) -> Result<Summary, ComposeError>;
}

pub struct ComparisonSummarizer;

impl Summarizer for ComparisonSummarizer {
    fn intent(&self) -> &str {
        "competitor_financial_comparison"
    }

    fn summarize(&self, _: &QuestionIntent, table: &ResultTable) -> Result<Summary, ComposeError> {
        Ok(Summary {
            sections: summarize_comparison(table)?,
            classifications: None,
            footer: vec![
                "Leaders are the largest value per metric and year; missing values are left out and flagged.".into(),
                "Year-over-year change is measured against the absolute prior-year value.".into(),
            ],
        })
    }
}

pub struct ScreenSummarizer;

impl Summarizer for ScreenSummarizer {
    fn intent(&self) -> &str {
        "sector_indicator_screen"
    }

    fn summarize(&self, _: &QuestionIntent, table: &ResultTable) -> Result<Summary, ComposeError> {
        let (sections, classes) = summarize_screen(table)?;
        Ok(Summary {
            sections,
            classifications: Some(classes),
            footer: vec![
                "Buckets follow fixed rules chosen for this tool, not thresholds from any published source.".into(),
                "Undervalued: mean PER and mean PBR below the sector means averaged over the company's years, and positive EPS in every year with data.".into(),
                "Growth potential: not undervalued, EPS strictly rising over at least two years, and mean PER at most the sector mean plus one population standard deviation.".into(),
                "This is a mechanical screen and not investment advice.".into(),
            ],
        })
    }
}

pub struct PriceSummarizer;

const PRICE_FIELDS: [(&str, &str); 4] = [
    ("open", "opened at"),
    ("close", "closed at"),
    ("high", "high"),
    ("low", "low"),
];

impl Summarizer for PriceSummarizer {
    fn intent(&self) -> &str {
        "price_lookup"
    }

    fn summarize(&self, _: &QuestionIntent, table: &ResultTable) -> Result<Summary, ComposeError> {
        let missing: Vec<String> = ["stock_code", "date"]
            .into_iter()
            .chain(PRICE_FIELDS.iter().map(|(c, _)| *c))
            .filter(|c| table.column_index(c).is_none())
            .map(String::from)
            .collect();
        if !missing.is_empty() {
            return Err(ComposeError::MissingColumns(missing));
        }
        let text = |row: usize, c: &str| {
            table
                .value(row, c)
                .filter(|v| !v.is_null())
                .map(|v| v.as_text().map(String::from).unwrap_or_else(|| v.to_string()))
        };
        let mut columns: Vec<String> = ["stock_code", "stock_abbrv", "date"].map(String::from).to_vec();
        columns.extend(PRICE_FIELDS.iter().map(|(c, _)| c.to_string()));
        let mut rows = Vec::new();
        let mut narrative = Vec::new();
        for row in 0..table.len() {
            let code = text(row, "stock_code").unwrap_or_default();
            let name = text(row, "stock_abbrv").unwrap_or_else(|| code.clone());
            let date = text(row, "date").unwrap_or_default();
            let mut cells = vec![code.clone(), name.clone(), date.clone()];
            let mut parts = Vec::new();
            for (c, verb) in PRICE_FIELDS {
                match table.value(row, c).and_then(|v| v.as_f64()) {
                    Some(v) => {
                        cells.push(currency(v));
                        parts.push(format!("{verb} {}", currency(v)));
                    }
                    None => {
                        cells.push(String::new());
                        parts.push(format!("{verb} no recorded value"));
                    }
                }
            }
            narrative.push(format!(
                "On {date}, {name} ({code}) {}, {}, with a high of {} and a low of {}.",
                parts[0],
                parts[1],
                parts[2].trim_start_matches("high "),
                parts[3].trim_start_matches("low ")
            ));
            rows.push(cells);
        }
        Ok(Summary {
            sections: vec![Section {
                heading: "Price".into(),
                narrative,
                table: Some(TableSlice { columns, rows }),
            }],
            classifications: None,
            footer: Vec::new(),
        })
    }
}

#[derive(Clone)]
pub struct SummarizerRegistry {
    by_intent: BTreeMap<String, Arc<dyn Summarizer>>,
}

impl Default for SummarizerRegistry {
    fn default() -> Self {
        let mut r = SummarizerRegistry::empty();
        r.register(Arc::new(ComparisonSummarizer));
        r.register(Arc::new(ScreenSummarizer));
        r.register(Arc::new(PriceSummarizer));
        r
    }
}

impl SummarizerRegistry {
    pub fn empty() -> Self {
        SummarizerRegistry {
            by_intent: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, s: Arc<dyn Summarizer>) {
        self.by_intent.insert(s.intent().to_string(), s);
    }

    pub fn get(&self, intent: &str) -> Option<&Arc<dyn Summarizer>> {
        self.by_intent.get(intent)
    }

    pub fn names(&self) -> Vec<String> {
        self.by_intent.keys().cloned().collect()
    }
}

pub fn compose(
    question: &str,
    translation: &TranslationResult,
    table: &ResultTable,
) -> Result<AnswerReport, ComposeError> {
    compose_with(question, translation, table, &SummarizerRegistry::default())
}

pub fn compose_with(
    question: &str,
    translation: &TranslationResult,
    table: &ResultTable,
    summarizers: &SummarizerRegistry,
) -> Result<AnswerReport, ComposeError> {
    let intent = &translation.intent;
    let summary = if table.is_empty() {
        Summary {
            sections: vec![Section {
                heading: "Result".into(),
                narrative: vec!["The query found no matching data.".into()],
                table: None,
            }],
            ..Default::default()
        }
    } else if let QuestionIntent::Unsupported { reason } = intent {
        Summary {
            sections: vec![Section {
                heading: "Unsupported question".into(),
                narrative: vec![
                    format!("No analysis is available: {reason}."),
                    "The raw rows follow.".into(),
                ],
                table: Some(TableSlice::of(table)),
            }],
            ..Default::default()
        }
    } else {
        match summarizers.get(intent.name()) {
            Some(s) => s.summarize(intent, table)?,
            None => Summary {
                sections: vec![Section {
                    heading: "Result".into(),
                    narrative: vec!["No summarizer is registered for this intent; the raw rows follow.".into()],
                    table: Some(TableSlice::of(table)),
                }],
                ..Default::default()
            },
        }
    };
    Ok(AnswerReport {
        question: question.to_string(),
        intent: intent.clone(),
        sections: summary.sections,
        classifications: summary.classifications,
        provenance: Provenance {
            query: translation.query_text.clone(),
            rows: table.len(),
            generator: translation.generator.clone(),
            notes: translation.notes.clone(),
        },
        footer: summary.footer,
    })
}

/// Report for a question that could not be translated.
pub fn unsupported_report(question: &str, reason: &str) -> AnswerReport {
    AnswerReport {
        question: question.to_string(),
        intent: QuestionIntent::Unsupported {
            reason: reason.to_string(),
        },
        sections: vec![Section {
            heading: "Unsupported question".into(),
            narrative: vec![format!("No analysis is available: {reason}.")],
            table: None,
        }],
        classifications: None,
        provenance: Provenance {
            query: String::new(),
            rows: 0,
            generator: String::new(),
            notes: Vec::new(),
        },
        footer: Vec::new(),
    }
}

impl AnswerReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports always serialize")
    }

    /// Terminal rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Question: {}", self.question);
        let _ = writeln!(out, "Intent: {}", self.intent.name());
        for s in &self.sections {
            let _ = writeln!(out, "\n## {}", s.heading);
            for line in &s.narrative {
                let _ = writeln!(out, "{line}");
            }
            if let Some(t) = &s.table {
                out.push('\n');
                out.push_str(&crate::exec::render_aligned(&t.columns, &t.rows));
            }
        }
        out.push_str("\n## Provenance\n");
        let _ = writeln!(out, "generator: {}", self.provenance.generator);
        let _ = writeln!(out, "rows: {}", self.provenance.rows);
        for n in &self.provenance.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(out, "query:");
        for line in self.provenance.query.lines() {
            let _ = writeln!(out, "  {line}");
        }
        if !self.footer.is_empty() {
            out.push('\n');
            for f in &self.footer {
                let _ = writeln!(out, "* {f}");
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaithfulnessViolation {
    pub section: String,
    pub sentence: String,
    pub token: String,
}

/// Narrative numbers that do not appear in their section's table slice.
/// Tokens are compared after number scanning of every cell and column name.
pub fn faithfulness_violations(report: &AnswerReport) -> Vec<FaithfulnessViolation> {
    let mut out = Vec::new();
    for s in &report.sections {
        let mut allowed = BTreeSet::new();
        if let Some(t) = &s.table {
            for text in t.columns.iter().chain(t.rows.iter().flatten()) {
                allowed.extend(number_tokens(text));
                allowed.insert(text.clone());
            }
        }
        for sentence in &s.narrative {
            for token in number_tokens(sentence) {
                if !allowed.contains(&token) {
                    out.push(FaithfulnessViolation {
                        section: s.heading.clone(),
                        sentence: sentence.clone(),
                        token,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cypher::ast::Query;
    use crate::translate::CompanyRef;
    use crate::value::Value;

    fn translation(intent: QuestionIntent) -> TranslationResult {
        TranslationResult {
            intent,
            query_text: "MATCH (n) RETURN n".into(),
            ast: Query { clauses: vec![] },
            notes: vec![],
            generator: "template".into(),
        }
    }

    fn price_intent() -> QuestionIntent {
        QuestionIntent::PriceLookup {
            company: CompanyRef::code("005930"),
            date: "20230306".into(),
        }
    }

    #[test]
    fn empty_table() {
        let t = ResultTable {
            columns: vec!["x".into()],
            ..Default::default()
        };
        let r = compose("q", &translation(price_intent()), &t).unwrap();
        assert!(r.sections[0].narrative[0].contains("no matching data"));
        assert_eq!(r.provenance.rows, 0);
        assert_eq!(r.provenance.query, "MATCH (n) RETURN n");
    }

    #[test]
    fn price_facts() {
        let cols = ["stock_code", "stock_abbrv", "date", "open", "close", "high", "low"];
        let vals = [
            Value::from("005930"),
            Value::from("Samsung"),
            Value::from("20230306"),
            Value::Float(61000.0),
            Value::Float(60500.0),
            Value::Float(61500.0),
            Value::Float(60000.0),
        ];
        let t = ResultTable {
            columns: cols.map(String::from).to_vec(),
            rows: vec![vals.into_iter().map(Cell::Value).collect()],
            type_mismatches: 0,
        };
        let r = compose("q", &translation(price_intent()), &t).unwrap();
        assert_eq!(r.sections.len(), 1);
        let s = &r.sections[0];
        assert_eq!(s.table.as_ref().unwrap().columns.len(), 7);
        assert!(s.narrative[0].contains("opened at 61\u{2009}000"));
        assert!(faithfulness_violations(&r).is_empty());
        assert!(r.to_text().contains("## Price"));
    }

    #[test]
    fn unsupported_keeps_rows() {
        let t = ResultTable {
            columns: vec!["n".into()],
            rows: vec![vec![Cell::Value(Value::Integer(3))]],
            type_mismatches: 0,
        };
        let intent = QuestionIntent::Unsupported {
            reason: "question does not match a supported analysis".into(),
        };
        let r = compose("q", &translation(intent), &t).unwrap();
        assert_eq!(r.sections[0].table.as_ref().unwrap().rows, [["3"]]);
        assert!(faithfulness_violations(&r).is_empty());
    }

    #[test]
    fn violations_are_found() {
        let mut r = unsupported_report("q", "none");
        r.sections[0]
            .narrative
            .push("A figure of 12.50% appears from nowhere.".into());
        let v = faithfulness_violations(&r);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].token, "12.50%");
    }
}

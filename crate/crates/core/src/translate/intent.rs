//! Rule-based question classification.
//!
//! Rules, checked in order on the ASCII-lowercased question:
//!
//! 1. A prediction cue (`will`, `predict`, `forecast`, `tomorrow`, `future`,
//!    `next year`) makes the question unsupported.
//! 2. A comparison cue (`compare`, `comparing`, `comparison`, `competitor`,
//!    `competitors`, `performance trends`, `versus`, `vs`) together with a
//!    financial-statement metric term gives a competitor comparison.
//! 3. A sector cue (`same industry`, `same sector`, `industry`, `sector`,
//!    `undervalued`, `growth potential`) together with `per`, `pbr` or `eps`
//!    gives a sector screen.
//! 4. A company, exactly one date and a price word gives a price lookup.
//!
//! Anything else is unsupported. Companies are found by `(stock code: X)`
//! spans first; a name written immediately before such a span is taken as
//! the span's display name and is not matched on its own. Remaining names are
//! matched against the lexicon.

use serde::Serialize;

use super::lexicon::{EntityKind, Lexicon};
use crate::graph::NodeId;
use crate::ingest::parse_date;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompanyRef {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolved_id: Option<NodeId>,
}

impl CompanyRef {
    pub fn code(code: &str) -> Self {
        CompanyRef {
            code: Some(code.to_string()),
            name: None,
            resolved_id: None,
        }
    }

    pub fn name(name: &str) -> Self {
        CompanyRef {
            code: None,
            name: Some(name.to_string()),
            resolved_id: None,
        }
    }

    pub fn label(&self) -> String {
        match (&self.name, &self.code) {
            (Some(n), Some(c)) => format!("{n} ({c})"),
            (Some(n), None) => n.clone(),
            (None, Some(c)) => c.clone(),
            (None, None) => "?".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectorRef {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolved_id: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ScreenAnchor {
    Company(CompanyRef),
    Sector(SectorRef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Revenue,
    OperatingIncome,
    NetIncome,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Revenue, Metric::OperatingIncome, Metric::NetIncome];

    pub fn property(self) -> &'static str {
        match self {
            Metric::Revenue => "revenue",
            Metric::OperatingIncome => "operating_income",
            Metric::NetIncome => "net_income",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Metric::Revenue => "Revenue",
            Metric::OperatingIncome => "Operating income",
            Metric::NetIncome => "Net income",
        }
    }

    pub fn from_property(p: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.property() == p)
    }
}

/// Disjunction of indicator thresholds; `None` leaves a metric out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScreenPredicate {
    pub per_below: Option<f64>,
    pub pbr_below: Option<f64>,
    pub eps_above: Option<f64>,
}

impl Default for ScreenPredicate {
    fn default() -> Self {
        ScreenPredicate {
            per_below: Some(10.0),
            pbr_below: Some(1.0),
            eps_above: Some(0.0),
        }
    }
}

impl Eq for ScreenPredicate {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "intent", rename_all = "snake_case")]
pub enum QuestionIntent {
    CompetitorFinancialComparison {
        anchor: CompanyRef,
        competitors: Vec<CompanyRef>,
        years: Vec<i64>,
        metrics: Vec<Metric>,
    },
    SectorIndicatorScreen {
        anchor: ScreenAnchor,
        years: Vec<i64>,
        predicate: ScreenPredicate,
    },
    PriceLookup {
        company: CompanyRef,
        date: String,
    },
    Unsupported {
        reason: String,
    },
}

impl QuestionIntent {
    /// Registry key of the intent.
    pub fn name(&self) -> &'static str {
        match self {
            QuestionIntent::CompetitorFinancialComparison { .. } => "competitor_financial_comparison",
            QuestionIntent::SectorIndicatorScreen { .. } => "sector_indicator_screen",
            QuestionIntent::PriceLookup { .. } => "price_lookup",
            QuestionIntent::Unsupported { .. } => "unsupported",
        }
    }

    fn unsupported(reason: &str) -> Self {
        QuestionIntent::Unsupported {
            reason: reason.to_string(),
        }
    }
}

const PREDICTION_CUES: [&str; 6] = ["will", "predict", "forecast", "tomorrow", "future", "next year"];
const COMPARISON_CUES: [&str; 8] = [
    "compare",
    "comparing",
    "comparison",
    "competitor",
    "competitors",
    "performance trends",
    "versus",
    "vs",
];
const SECTOR_CUES: [&str; 6] = [
    "same industry",
    "same sector",
    "industry",
    "sector",
    "undervalued",
    "growth potential",
];
const PRICE_WORDS: [&str; 9] = [
    "price", "prices", "close", "closing", "open", "opening", "high", "low", "trading",
];
const METRIC_TERMS: [(&str, Metric); 7] = [
    ("revenue", Metric::Revenue),
    ("revenues", Metric::Revenue),
    ("sales", Metric::Revenue),
    ("operating income", Metric::OperatingIncome),
    ("operating profit", Metric::OperatingIncome),
    ("net income", Metric::NetIncome),
    ("net profit", Metric::NetIncome),
];
const GENERIC_METRIC_TERMS: [&str; 3] = ["financial performance", "financials", "financial statements"];

/// Lowercased words joined by single spaces and padded, so phrase tests can
/// look for `" phrase "`.
struct Words {
    padded: String,
    words: Vec<String>,
}

impl Words {
    fn new(text: &str) -> Self {
        let words: Vec<String> = text
            .to_ascii_lowercase()
            .split(|c: char| !(c.is_alphanumeric() || c == '-' || c == '.'))
            .map(|w| w.trim_matches(|c| c == '.' || c == '-').to_string())
            .filter(|w| !w.is_empty())
            .collect();
        Words {
            padded: format!(" {} ", words.join(" ")),
            words,
        }
    }

    fn has(&self, phrase: &str) -> bool {
        self.padded.contains(&format!(" {phrase} "))
    }

    fn any(&self, phrases: &[&str]) -> bool {
        phrases.iter().any(|p| self.has(p))
    }
}

/// `(stock code: XXXXXX)` spans: byte range and code.
fn code_spans(question: &str) -> Vec<(usize, usize, String)> {
    let lower = question.to_ascii_lowercase();
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(rel) = lower[from..].find("(stock code") {
        let start = from + rel;
        let mut i = start + "(stock code".len();
        let b = lower.as_bytes();
        while i < b.len() && (b[i] == b' ' || b[i] == b':') {
            i += 1;
        }
        let code_start = i;
        while i < b.len() && b[i].is_ascii_alphanumeric() {
            i += 1;
        }
        let code = question[code_start..i].to_ascii_uppercase();
        while i < b.len() && b[i] == b' ' {
            i += 1;
        }
        if code.len() == 6 && i < b.len() && b[i] == b')' {
            out.push((start, i + 1, code));
            from = i + 1;
        } else {
            from = start + 1;
        }
    }
    out
}

/// Standalone four-digit years in 1900..=2999, ascending and distinct.
fn years(words: &Words) -> Vec<i64> {
    let mut ys: Vec<i64> = words
        .words
        .iter()
        .filter(|w| w.len() == 4 && w.bytes().all(|b| b.is_ascii_digit()))
        .filter_map(|w| w.parse().ok())
        .filter(|y| (1900..=2999).contains(y))
        .collect();
    ys.sort_unstable();
    ys.dedup();
    ys
}

/// Dates written as `YYYYMMDD` or `YYYY-MM-DD`, normalised to `YYYYMMDD`.
fn dates(words: &Words) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for w in &words.words {
        let compact: String = w.chars().filter(|c| *c != '-').collect();
        let shaped = w.len() == 8 || (w.len() == 10 && w.as_bytes()[4] == b'-' && w.as_bytes()[7] == b'-');
        if shaped && parse_date(&compact).is_some() && !out.contains(&compact) {
            out.push(compact);
        }
    }
    out
}

fn threshold(words: &Words, metric: &str, below: bool) -> Option<f64> {
    let cmp_words: &[&str] = if below {
        &["<", "below", "under", "less"]
    } else {
        &[">", "above", "over", "greater", "exceeding"]
    };
    let w = &words.words;
    for i in 0..w.len() {
        if w[i] != metric {
            continue;
        }
        let window = &w[i + 1..w.len().min(i + 5)];
        if let Some(k) = window.iter().position(|x| cmp_words.contains(&x.as_str())) {
            if let Some(n) = window[k + 1..].iter().find_map(|x| x.parse::<f64>().ok()) {
                return Some(n);
            }
        }
    }
    None
}

fn screen_predicate(question: &str) -> ScreenPredicate {
    // "<" and ">" are not word characters
    let spaced = Words::new(&question.replace('<', " below ").replace('>', " above "));
    let parsed = ScreenPredicate {
        per_below: threshold(&spaced, "per", true),
        pbr_below: threshold(&spaced, "pbr", true),
        eps_above: threshold(&spaced, "eps", false),
    };
    if parsed.per_below.is_none() && parsed.pbr_below.is_none() && parsed.eps_above.is_none() {
        ScreenPredicate::default()
    } else {
        parsed
    }
}

/// Companies in order of first mention, and sectors.
fn entities(question: &str, lexicon: &Lexicon) -> (Vec<CompanyRef>, Vec<SectorRef>) {
    let spans = code_spans(question);
    let masked: Vec<(usize, usize)> = spans.iter().map(|(s, e, _)| (*s, *e)).collect();
    let mentions = lexicon.scan(question, &masked);
    let mut companies: Vec<(usize, CompanyRef)> = Vec::new();
    let mut covered = Vec::new();
    for (start, _, code) in &spans {
        let name = mentions
            .iter()
            .position(|m| m.kind == EntityKind::Company && question[m.end..*start].trim().is_empty());
        if let Some(i) = name {
            covered.push(i);
        }
        let pos = name.map_or(*start, |i| mentions[i].start);
        companies.push((
            pos,
            CompanyRef {
                code: Some(code.clone()),
                name: name.map(|i| mentions[i].surface.clone()),
                resolved_id: None,
            },
        ));
    }
    let mut sectors = Vec::new();
    for (i, m) in mentions.iter().enumerate() {
        if covered.contains(&i) {
            continue;
        }
        match m.kind {
            EntityKind::Company => companies.push((m.start, CompanyRef::name(&m.surface))),
            EntityKind::Sector => sectors.push(SectorRef {
                name: m.surface.clone(),
                resolved_id: None,
            }),
        }
    }
    companies.sort_by_key(|(pos, _)| *pos);
    let mut out: Vec<CompanyRef> = Vec::new();
    for (_, c) in companies {
        let key = |r: &CompanyRef| {
            r.code
                .clone()
                .or_else(|| {
                    let ids = lexicon.lookup(r.name.as_deref().unwrap_or(""), EntityKind::Company);
                    (ids.len() == 1)
                        .then(|| lexicon.company(ids[0]).map(|i| i.code.clone()))
                        .flatten()
                })
                .or_else(|| r.name.as_ref().map(|n| n.to_ascii_lowercase()))
        };
        if !out.iter().any(|o| key(o) == key(&c)) {
            out.push(c);
        }
    }
    (out, sectors)
}

/// Classifies a question and extracts its entities, years and thresholds.
pub fn classify(question: &str, lexicon: &Lexicon) -> QuestionIntent {
    let words = Words::new(question);
    if words.any(&PREDICTION_CUES) {
        return QuestionIntent::unsupported("no prediction capability");
    }
    let (companies, sectors) = entities(question, lexicon);
    let years = years(&words);

    let mut metrics: Vec<Metric> = METRIC_TERMS
        .iter()
        .filter(|(t, _)| words.has(t))
        .map(|(_, m)| *m)
        .collect();
    metrics.sort();
    metrics.dedup();
    if metrics.is_empty() && words.any(&GENERIC_METRIC_TERMS) {
        metrics = Metric::ALL.to_vec();
    }

    if words.any(&COMPARISON_CUES) && !metrics.is_empty() {
        let Some((anchor, competitors)) = companies.split_first() else {
            return QuestionIntent::unsupported("comparison question names no company");
        };
        if years.is_empty() {
            return QuestionIntent::unsupported("comparison question names no years");
        }
        return QuestionIntent::CompetitorFinancialComparison {
            anchor: anchor.clone(),
            competitors: competitors.to_vec(),
            years,
            metrics,
        };
    }

    if words.any(&SECTOR_CUES) && words.any(&["per", "pbr", "eps"]) {
        let anchor = match (companies.first(), sectors.first()) {
            (Some(c), _) => ScreenAnchor::Company(c.clone()),
            (None, Some(s)) => ScreenAnchor::Sector(s.clone()),
            (None, None) => return QuestionIntent::unsupported("screen question names no company or sector"),
        };
        if years.is_empty() {
            return QuestionIntent::unsupported("screen question names no years");
        }
        return QuestionIntent::SectorIndicatorScreen {
            anchor,
            years,
            predicate: screen_predicate(question),
        };
    }

    let dates = dates(&words);
    if words.any(&PRICE_WORDS) && dates.len() == 1 {
        if let Some(company) = companies.first() {
            return QuestionIntent::PriceLookup {
                company: company.clone(),
                date: dates[0].clone(),
            };
        }
    }

    QuestionIntent::unsupported("question does not match a supported analysis")
}

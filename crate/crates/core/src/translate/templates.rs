use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::intent::*;
use super::lexicon::{EntityKind, Lexicon};
use super::TranslateError;
use crate::cypher::render::render_literal;
use crate::graph::NodeId;
use crate::value::Value;

/// Query text for one intent kind, plus notes about defaults applied.
pub trait QueryTemplate: Send + Sync {
    fn intent(&self) -> &'static str;
    fn instantiate(&self, intent: &QuestionIntent, lexicon: &Lexicon) -> Result<(String, Vec<String>), TranslateError>;
}

/// Templates keyed by intent name.
#[derive(Clone)]
pub struct TemplateRegistry {
    templates: BTreeMap<&'static str, Arc<dyn QueryTemplate>>,
}

impl Default for TemplateRegistry {
    fn default() -> Self {
        let mut r = TemplateRegistry::empty();
        r.register(Arc::new(ComparisonTemplate));
        r.register(Arc::new(ScreenTemplate));
        r.register(Arc::new(PriceLookupTemplate));
        r
    }
}

impl TemplateRegistry {
    pub fn empty() -> Self {
        TemplateRegistry {
            templates: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, t: Arc<dyn QueryTemplate>) {
        self.templates.insert(t.intent(), t);
    }

    pub fn get(&self, intent: &str) -> Option<&Arc<dyn QueryTemplate>> {
        self.templates.get(intent)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.templates.keys().copied()
    }
}

pub(crate) fn resolve_company(r: &CompanyRef, lexicon: &Lexicon) -> Result<NodeId, TranslateError> {
    if let Some(id) = r.resolved_id {
        if lexicon.company(id).is_some() {
            return Ok(id);
        }
    }
    if let Some(code) = &r.code {
        return lexicon
            .company_by_code(code)
            .ok_or_else(|| TranslateError::EntityNotFound(r.label()));
    }
    let name = r.name.as_deref().unwrap_or("");
    match lexicon.lookup(name, EntityKind::Company)[..] {
        [id] => Ok(id),
        [] => Err(TranslateError::EntityNotFound(r.label())),
        _ => Err(TranslateError::AmbiguousEntity(r.label())),
    }
}

pub(crate) fn resolve_sector(r: &SectorRef, lexicon: &Lexicon) -> Result<NodeId, TranslateError> {
    if let Some(id) = r.resolved_id.filter(|id| lexicon.sector_name(*id).is_some()) {
        return Ok(id);
    }
    match lexicon.lookup(&r.name, EntityKind::Sector)[..] {
        [id] => Ok(id),
        [] => Err(TranslateError::EntityNotFound(r.name.clone())),
        _ => Err(TranslateError::AmbiguousEntity(r.name.clone())),
    }
}

fn code_of(id: NodeId, lexicon: &Lexicon) -> String {
    lexicon.company(id).map(|c| c.code.clone()).unwrap_or_default()
}

fn year_list(years: &[i64]) -> String {
    let items: Vec<String> = years.iter().map(i64::to_string).collect();
    format!("[{}]", items.join(", "))
}

fn number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        (v as i64).to_string()
    } else {
        render_literal(&Value::Float(v))
    }
}

/// Lowercase ASCII letters and digits of the abbreviation, e.g. `skhynix`.
fn slug(abbrv: &str) -> String {
    abbrv
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

fn unique_slugs(abbrvs: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for (i, a) in abbrvs.iter().enumerate() {
        let mut s = slug(a);
        if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
            s = format!("c{}{s}", i + 1);
        }
        if out.contains(&s) {
            s = format!("{s}_{}", i + 1);
        }
        out.push(s);
    }
    out
}

fn metrics_note(metrics: &[Metric]) -> Option<String> {
    (metrics.is_empty()).then(|| "no metric named; using revenue, operating income and net income".into())
}

pub struct ComparisonTemplate;

impl QueryTemplate for ComparisonTemplate {
    fn intent(&self) -> &'static str {
        "competitor_financial_comparison"
    }

    fn instantiate(&self, intent: &QuestionIntent, lexicon: &Lexicon) -> Result<(String, Vec<String>), TranslateError> {
        let QuestionIntent::CompetitorFinancialComparison {
            anchor,
            competitors,
            years,
            metrics,
        } = intent
        else {
            return Err(TranslateError::TemplateGap(intent.name().into()));
        };
        let mut notes: Vec<String> = metrics_note(metrics).into_iter().collect();
        let metrics: Vec<Metric> = if metrics.is_empty() {
            Metric::ALL.to_vec()
        } else {
            metrics.clone()
        };
        let anchor_id = resolve_company(anchor, lexicon)?;
        if competitors.is_empty() {
            notes.push("no competitor named; competitors are found through COMPETES_WITH".into());
            return Ok((traversal_query(&code_of(anchor_id, lexicon), years, &metrics), notes));
        }
        let mut ids = vec![anchor_id];
        for c in competitors {
            ids.push(resolve_company(c, lexicon)?);
        }
        let abbrvs: Vec<String> = ids
            .iter()
            .map(|id| lexicon.company(*id).map(|c| c.abbrv.clone()).unwrap_or_default())
            .collect();
        let slugs = unique_slugs(&abbrvs);

        let mut q = String::new();
        for (i, id) in ids.iter().enumerate() {
            let n = i + 1;
            let year = if i == 0 { "(y:Year)" } else { "(y)" };
            let _ = writeln!(
                q,
                "MATCH (c{n}:Company {{stock_code: {}}})-[:HAS_FINANCIAL_STATEMENTS]\n->(fs{n}:FinancialStatements)-[:FOR_YEAR]->{year}",
                render_literal(&Value::from(code_of(*id, lexicon)))
            );
        }
        let _ = writeln!(q, "WHERE y.year IN {}", year_list(years));
        let mut items = vec!["y.year AS year".to_string()];
        for (i, s) in slugs.iter().enumerate() {
            let n = i + 1;
            items.push(format!("c{n}.stock_abbrv AS {s}_stock_abbrv"));
            for m in &metrics {
                items.push(format!("fs{n}.{p} AS {s}_{p}", p = m.property()));
            }
        }
        let _ = writeln!(q, "RETURN\n  {}", items.join(",\n  "));
        q.push_str("ORDER BY y.year ASC");
        Ok((q, notes))
    }
}

fn traversal_query(code: &str, years: &[i64], metrics: &[Metric]) -> String {
    let mut items = vec![
        "y.year AS year".to_string(),
        "anchor.stock_abbrv AS anchor_stock_abbrv".to_string(),
    ];
    for m in metrics {
        items.push(format!("fs1.{p} AS anchor_{p}", p = m.property()));
    }
    items.push("peer.stock_abbrv AS peer_stock_abbrv".into());
    for m in metrics {
        items.push(format!("fs2.{p} AS peer_{p}", p = m.property()));
    }
    format!(
        "MATCH (anchor:Company {{stock_code: {}}})-[:COMPETES_WITH]->(peer:Company)\n\
         MATCH (anchor)-[:HAS_FINANCIAL_STATEMENTS]->(fs1:FinancialStatements)-[:FOR_YEAR]->(y:Year)\n\
         MATCH (peer)-[:HAS_FINANCIAL_STATEMENTS]->(fs2:FinancialStatements)-[:FOR_YEAR]->(y)\n\
         WHERE y.year IN {}\n\
         RETURN\n  {}\n\
         ORDER BY y.year ASC, peer.stock_code ASC",
        render_literal(&Value::from(code)),
        year_list(years),
        items.join(",\n  ")
    )
}

pub struct ScreenTemplate;

fn predicate_text(p: &ScreenPredicate) -> Option<String> {
    let mut parts = Vec::new();
    if let Some(v) = p.per_below {
        parts.push(format!("ind.per < {}", number(v)));
    }
    if let Some(v) = p.pbr_below {
        parts.push(format!("ind.pbr < {}", number(v)));
    }
    if let Some(v) = p.eps_above {
        parts.push(format!("ind.eps > {}", number(v)));
    }
    (!parts.is_empty()).then(|| format!("({})", parts.join(" OR ")))
}

impl QueryTemplate for ScreenTemplate {
    fn intent(&self) -> &'static str {
        "sector_indicator_screen"
    }

    fn instantiate(&self, intent: &QuestionIntent, lexicon: &Lexicon) -> Result<(String, Vec<String>), TranslateError> {
        let QuestionIntent::SectorIndicatorScreen {
            anchor,
            years,
            predicate,
        } = intent
        else {
            return Err(TranslateError::TemplateGap(intent.name().into()));
        };
        let mut notes = Vec::new();
        let head = match anchor {
            ScreenAnchor::Company(c) => {
                let id = resolve_company(c, lexicon)?;
                format!(
                    "MATCH (anchor:Company {{stock_code: {}}})-[:BELONGS_TO]->(s:Sector)\n\
                     <-[:BELONGS_TO]-(c:Company)\n\
                     WHERE c.stock_code <> anchor.stock_code\n",
                    render_literal(&Value::from(code_of(id, lexicon)))
                )
            }
            ScreenAnchor::Sector(s) => {
                let id = resolve_sector(s, lexicon)?;
                let name = lexicon.sector_name(id).unwrap_or(&s.name).to_string();
                format!(
                    "MATCH (s:Sector {{stock_sector_nm: {}}})<-[:BELONGS_TO]-(c:Company)\n",
                    render_literal(&Value::from(name))
                )
            }
        };
        if *predicate == ScreenPredicate::default() {
            notes.push("default screen thresholds applied: per < 10 OR pbr < 1 OR eps > 0".into());
        }
        let mut q = head;
        q.push_str("WITH c\n");
        q.push_str("MATCH (c)-[:HAS_INDICATOR]->(ind:Indicator)-[:MEASURED_ON]->(d:Date)\n");
        let _ = writeln!(q, "WHERE d.year IN {}", year_list(years));
        q.push_str("WITH c, ind, d\n");
        if let Some(p) = predicate_text(predicate) {
            let _ = writeln!(q, "WHERE {p}");
        }
        q.push_str(
            "RETURN\n    c.stock_code AS stock_code, c.stock_abbrv AS stock_abbrv,\n    \
             d.year AS year, ind.per AS per, ind.pbr AS pbr, ind.eps AS eps\n\
             ORDER BY d.year, ind.per ASC, ind.pbr ASC, ind.eps DESC",
        );
        Ok((q, notes))
    }
}

pub struct PriceLookupTemplate;

impl QueryTemplate for PriceLookupTemplate {
    fn intent(&self) -> &'static str {
        "price_lookup"
    }

    fn instantiate(&self, intent: &QuestionIntent, lexicon: &Lexicon) -> Result<(String, Vec<String>), TranslateError> {
        let QuestionIntent::PriceLookup { company, date } = intent else {
            return Err(TranslateError::TemplateGap(intent.name().into()));
        };
        let id = resolve_company(company, lexicon)?;
        let q = format!(
            "MATCH (c:Company {{stock_code: {}}})-[:HAS_STOCK_PRICE]\n\
             ->(sp:StockPrice)-[:RECORDED_ON]->(d:Date {{date: {}}})\n\
             OPTIONAL MATCH (d)-[:IN_YEAR]->(y:Year)\n\
             OPTIONAL MATCH (d)-[:IN_QUARTER]->(q:Quarter)\n\
             RETURN\n  c.stock_code AS stock_code, c.stock_abbrv AS stock_abbrv, d.date AS date,\n  \
             sp.stck_oprc AS open, sp.stck_clpr AS close, sp.stck_hgpr AS high, sp.stck_lwpr AS low,\n  \
             y.year AS year, q.quarter AS quarter",
            render_literal(&Value::from(code_of(id, lexicon))),
            render_literal(&Value::from(date.as_str()))
        );
        Ok((q, Vec::new()))
    }
}

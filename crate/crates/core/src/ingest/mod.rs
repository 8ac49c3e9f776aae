//! Building the market graph from flat files.
//!
//! Companies load first, then time series. Every node is checked against
//! the [`SchemaCatalog`] before it is created; records that fail are
//! reported and skipped. Repeated keys are last-wins: a second company with
//! the same stock code, a second price or indicator for the same
//! (stock_code, date), or a second statement for the same
//! (stock_code, year, quarter) overwrite the earlier node's properties.

mod calendar;
pub mod files;
pub mod fixture;
mod records;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;
use tracing::{debug, warn};

pub use calendar::{build_calendar, quarter_of};
pub use records::*;

use crate::graph::{Direction, GraphStats, NodeId, PropertyGraph};
use crate::schema::SchemaCatalog;
use crate::value::{Props, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("bad date {0:?}, expected YYYYMMDD")]
    BadDate(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("bad fixture spec: {0}")]
    BadSpec(String),
}

/// Equality indexes the pipeline declares on every graph it writes.
pub const MARKET_INDEXES: [(&str, &str); 6] = [
    ("Company", "stock_code"),
    ("Company", "stock_abbrv"),
    ("Sector", "stock_sector_nm"),
    ("Date", "date"),
    ("Year", "year"),
    ("Quarter", "year"),
];

pub fn declare_market_indexes(graph: &mut PropertyGraph) {
    for (label, prop) in MARKET_INDEXES {
        graph.declare_index(label, prop);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub file: String,
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnresolvedCompetitor {
    pub stock_code: String,
    pub competitor: String,
}

/// Nodes created per label and edges created per relationship type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Loaded {
    pub nodes: BTreeMap<String, usize>,
    pub edges: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub loaded: Loaded,
    pub rejected: Vec<Rejection>,
    pub unresolved_competitors: Vec<UnresolvedCompetitor>,
}

impl IngestReport {
    pub fn merge(&mut self, other: IngestReport) {
        for (k, v) in other.loaded.nodes {
            *self.loaded.nodes.entry(k).or_default() += v;
        }
        for (k, v) in other.loaded.edges {
            *self.loaded.edges.entry(k).or_default() += v;
        }
        self.rejected.extend(other.rejected);
        self.unresolved_competitors.extend(other.unresolved_competitors);
    }

    fn reject<T>(&mut self, at: &Located<T>, reason: impl Into<String>) {
        let reason = reason.into();
        warn!(file = %at.file, line = at.line, %reason, "record rejected");
        self.rejected.push(Rejection {
            file: at.file.clone(),
            line: at.line,
            reason,
        });
    }

    fn set_loaded(&mut self, before: &GraphStats, after: &GraphStats) {
        let diff = |a: &BTreeMap<String, usize>, b: &BTreeMap<String, usize>| {
            b.iter()
                .map(|(k, v)| (k.clone(), v - a.get(k).copied().unwrap_or(0).min(*v)))
                .filter(|(_, v)| *v > 0)
                .collect::<BTreeMap<_, _>>()
        };
        self.loaded = Loaded {
            nodes: diff(&before.labels, &after.labels),
            edges: diff(&before.rel_types, &after.rel_types),
        };
    }
}

fn violations_text(v: &[crate::schema::Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub fn find_company(graph: &PropertyGraph, code: &str) -> Option<NodeId> {
    graph
        .find_nodes("Company", "stock_code", &Value::from(code))
        .first()
        .copied()
}

fn text_prop(p: &mut Props, key: &str, v: &str) {
    if !v.is_empty() {
        p.insert(key.to_string(), Value::from(v));
    }
}

fn company_props(r: &CompanyRecord) -> Props {
    let mut p = Props::new();
    text_prop(&mut p, "stock_code", &r.stock_code);
    text_prop(&mut p, "stock_nm", &r.stock_nm);
    text_prop(&mut p, "stock_abbrv", &r.stock_abbrv);
    text_prop(&mut p, "stock_nm_eng", &r.stock_nm_eng);
    text_prop(&mut p, "listing_dt", &r.listing_dt);
    text_prop(&mut p, "market_nm", &r.market_nm);
    p.insert("outstanding_shares".into(), Value::Integer(r.outstanding_shares));
    p.insert("kospi200_item_yn".into(), Value::Boolean(r.kospi200_item_yn));
    if !r.competitors.is_empty() {
        p.insert("compete_stock_code_li".into(), Value::TextList(r.competitors.clone()));
    }
    p
}

/// Whether `a` names `b` among its competitor codes.
fn lists(graph: &PropertyGraph, a: NodeId, b: NodeId) -> bool {
    let Some(b_code) = graph
        .node(b)
        .and_then(|n| n.prop("stock_code"))
        .and_then(Value::as_text)
    else {
        return false;
    };
    matches!(
        graph.node(a).and_then(|n| n.prop("compete_stock_code_li")),
        Some(Value::TextList(codes)) if codes.iter().any(|c| c == b_code)
    )
}

fn has_edge(graph: &PropertyGraph, src: NodeId, rel: &str, dst: NodeId) -> bool {
    graph
        .neighbors(src, Direction::Out, Some(&[rel]))
        .expect("node exists")
        .iter()
        .any(|e| e.dst == dst)
}

/// Loads company records, their sectors and BELONGS_TO edges, then wires
/// COMPETES_WITH in both directions for every competitor code that resolves
/// to a loaded company.
pub fn ingest_companies(
    graph: &mut PropertyGraph,
    catalog: &SchemaCatalog,
    records: &[Located<CompanyRecord>],
) -> IngestReport {
    declare_market_indexes(graph);
    let before = graph.stats();
    let mut report = IngestReport::default();
    let mut batch = Vec::new();

    for at in records {
        let r = &at.record;
        if let Err(reason) = r.check() {
            report.reject(at, reason);
            continue;
        }
        let props = company_props(r);
        let violations = catalog.validate_node("Company", &props);
        if !violations.is_empty() {
            report.reject(at, violations_text(&violations));
            continue;
        }
        let sector_name = Value::from(r.sector.trim());
        let sector_props: Props = [("stock_sector_nm".to_string(), sector_name.clone())].into();
        let violations = catalog.validate_node("Sector", &sector_props);
        if !violations.is_empty() {
            report.reject(at, violations_text(&violations));
            continue;
        }
        let sector = match graph.find_nodes("Sector", "stock_sector_nm", &sector_name).first() {
            Some(id) => *id,
            None => graph.create_node(["Sector"], sector_props).expect("labelled"),
        };
        let company = match find_company(graph, &r.stock_code) {
            Some(id) => {
                let current = &graph.node(id).expect("found").props;
                // the competitor names are derived below, so compare without them
                let same = current
                    .iter()
                    .filter(|(k, _)| k.as_str() != "compete_stock_nm_li")
                    .eq(props.iter().filter(|(k, _)| k.as_str() != "compete_stock_nm_li"));
                if same {
                    debug!(stock_code = %r.stock_code, "company record already loaded");
                } else {
                    warn!(stock_code = %r.stock_code, "duplicate company record replaces earlier one");
                    graph.replace_properties(id, props).expect("node exists");
                }
                let stale: Vec<_> = graph
                    .neighbors(id, Direction::Out, Some(&["BELONGS_TO"]))
                    .expect("node exists")
                    .iter()
                    .filter(|e| e.dst != sector)
                    .map(|e| e.id)
                    .collect();
                for e in stale {
                    graph.remove_edge(e).expect("edge exists");
                }
                id
            }
            None => graph.create_node(["Company"], props).expect("labelled"),
        };
        if !has_edge(graph, company, "BELONGS_TO", sector) {
            graph
                .create_edge(company, "BELONGS_TO", sector, Props::new())
                .expect("endpoints exist");
        }
        batch.push(r.stock_code.clone());
    }

    let batch: HashSet<String> = batch.into_iter().collect();
    let mut unresolved = BTreeSet::new();
    let companies: Vec<NodeId> = graph.nodes_with_label("Company").collect();
    for c in companies {
        let node = graph.node(c).expect("listed");
        let own = node
            .prop("stock_code")
            .and_then(Value::as_text)
            .unwrap_or("")
            .to_string();
        let Some(Value::TextList(codes)) = node.prop("compete_stock_code_li").cloned() else {
            continue;
        };
        let mut names = Vec::new();
        for code in codes.iter().filter(|code| **code != own) {
            match find_company(graph, code) {
                Some(other) => {
                    let n = graph.node(other).expect("found");
                    let name = n.prop("stock_nm").and_then(Value::as_text).unwrap_or(code).to_string();
                    names.push(name);
                    for (a, b) in [(c, other), (other, c)] {
                        if !has_edge(graph, a, "COMPETES_WITH", b) {
                            graph
                                .create_edge(a, "COMPETES_WITH", b, Props::new())
                                .expect("endpoints exist");
                        }
                    }
                }
                None if batch.contains(&own) => {
                    unresolved.insert((own.clone(), code.clone()));
                }
                None => {}
            }
        }
        graph
            .set_property(c, "compete_stock_nm_li", Value::TextList(names))
            .expect("node exists");
    }
    // drop competitor edges that neither side lists any more
    for code in &batch {
        let Some(c) = find_company(graph, code) else { continue };
        let stale: Vec<_> = graph
            .neighbors(c, Direction::Both, Some(&["COMPETES_WITH"]))
            .expect("node exists")
            .iter()
            .filter(|e| {
                let other = e.other(c);
                !lists(graph, c, other) && !lists(graph, other, c)
            })
            .map(|e| e.id)
            .collect();
        for e in stale {
            graph.remove_edge(e).expect("edge exists");
        }
    }
    for (stock_code, competitor) in unresolved {
        warn!(%stock_code, %competitor, "competitor code does not resolve");
        report
            .unresolved_competitors
            .push(UnresolvedCompetitor { stock_code, competitor });
    }
    report.set_loaded(&before, &graph.stats());
    report
}

type PointKey = (String, String);
type StatementKey = (String, i64, Option<i64>);

struct Existing {
    prices: HashMap<PointKey, NodeId>,
    indicators: HashMap<PointKey, NodeId>,
    statements: HashMap<StatementKey, NodeId>,
}

fn first_target<'g>(g: &'g PropertyGraph, from: NodeId, rel: &str) -> Option<&'g crate::graph::Node> {
    let edges = g.neighbors(from, Direction::Out, Some(&[rel])).ok()?;
    g.node(edges.first()?.dst)
}

fn existing_series(graph: &PropertyGraph) -> Existing {
    let mut ex = Existing {
        prices: HashMap::new(),
        indicators: HashMap::new(),
        statements: HashMap::new(),
    };
    for c in graph.nodes_with_label("Company") {
        let code = graph
            .node(c)
            .and_then(|n| n.prop("stock_code"))
            .and_then(Value::as_text)
            .unwrap_or("")
            .to_string();
        for e in graph.neighbors(c, Direction::Out, None).expect("listed") {
            let date_of = |rel| {
                first_target(graph, e.dst, rel)
                    .and_then(|d| d.prop("date"))
                    .and_then(Value::as_text)
                    .map(String::from)
            };
            match e.rel_type.as_str() {
                "HAS_STOCK_PRICE" => {
                    if let Some(d) = date_of("RECORDED_ON") {
                        ex.prices.insert((code.clone(), d), e.dst);
                    }
                }
                "HAS_INDICATOR" => {
                    if let Some(d) = date_of("MEASURED_ON") {
                        ex.indicators.insert((code.clone(), d), e.dst);
                    }
                }
                "HAS_FINANCIAL_STATEMENTS" => {
                    let year = first_target(graph, e.dst, "FOR_YEAR")
                        .and_then(|y| y.prop("year"))
                        .and_then(Value::as_i64);
                    let quarter = first_target(graph, e.dst, "FOR_QUARTER")
                        .and_then(|q| q.prop("quarter"))
                        .and_then(Value::as_i64);
                    if let Some(y) = year {
                        ex.statements.insert((code.clone(), y, quarter), e.dst);
                    }
                }
                _ => {}
            }
        }
    }
    ex
}

fn metric_props(pairs: &[(&str, Option<f64>)]) -> Props {
    pairs
        .iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), Value::Float(v))))
        .collect()
}

struct SeriesNode<'a> {
    label: &'a str,
    owner_rel: &'a str,
    props: Props,
}

/// Creates or overwrites one time-series node. Returns the node and whether
/// it is new.
fn upsert<K: std::hash::Hash + Eq + std::fmt::Debug>(
    graph: &mut PropertyGraph,
    existing: &mut HashMap<K, NodeId>,
    key: K,
    company: NodeId,
    spec: SeriesNode,
) -> (NodeId, bool) {
    if let Some(id) = existing.get(&key) {
        if graph.node(*id).expect("indexed").props == spec.props {
            debug!(?key, label = spec.label, "record already loaded");
        } else {
            warn!(?key, label = spec.label, "duplicate record replaces earlier one");
            graph.replace_properties(*id, spec.props).expect("node exists");
        }
        return (*id, false);
    }
    let id = graph.create_node([spec.label], spec.props).expect("labelled");
    graph
        .create_edge(company, spec.owner_rel, id, Props::new())
        .expect("endpoints exist");
    existing.insert(key, id);
    (id, true)
}

/// Loads prices, indicators and financial statements for companies that are
/// already in the graph.
pub fn ingest_timeseries(
    graph: &mut PropertyGraph,
    catalog: &SchemaCatalog,
    prices: &[Located<DailyPriceRecord>],
    indicators: &[Located<IndicatorRecord>],
    statements: &[Located<FinStatementRecord>],
) -> IngestReport {
    declare_market_indexes(graph);
    let before = graph.stats();
    let mut report = IngestReport::default();
    let mut ex = existing_series(graph);

    for at in prices {
        let r = &at.record;
        if let Err(reason) = r.check() {
            report.reject(at, reason);
            continue;
        }
        let Some(company) = find_company(graph, &r.stock_code) else {
            report.reject(at, format!("unknown stock_code {}", r.stock_code));
            continue;
        };
        if parse_date(&r.date).is_none() {
            report.reject(at, IngestError::BadDate(r.date.clone()).to_string());
            continue;
        }
        let props = metric_props(&[
            ("stck_oprc", Some(r.open)),
            ("stck_clpr", Some(r.close)),
            ("stck_hgpr", Some(r.high)),
            ("stck_lwpr", Some(r.low)),
        ]);
        let violations = catalog.validate_node("StockPrice", &props);
        if !violations.is_empty() {
            report.reject(at, violations_text(&violations));
            continue;
        }
        let key = (r.stock_code.clone(), r.date.clone());
        let spec = SeriesNode {
            label: "StockPrice",
            owner_rel: "HAS_STOCK_PRICE",
            props,
        };
        let (id, new) = upsert(graph, &mut ex.prices, key, company, spec);
        if new {
            let d = build_calendar(graph, &r.date).expect("date checked");
            graph
                .create_edge(id, "RECORDED_ON", d, Props::new())
                .expect("endpoints exist");
        }
    }

    for at in indicators {
        let r = &at.record;
        if let Err(reason) = r.check() {
            report.reject(at, reason);
            continue;
        }
        let Some(company) = find_company(graph, &r.stock_code) else {
            report.reject(at, format!("unknown stock_code {}", r.stock_code));
            continue;
        };
        if parse_date(&r.date).is_none() {
            report.reject(at, IngestError::BadDate(r.date.clone()).to_string());
            continue;
        }
        let props = metric_props(&[("per", r.per), ("pbr", r.pbr), ("eps", r.eps)]);
        let violations = catalog.validate_node("Indicator", &props);
        if !violations.is_empty() {
            report.reject(at, violations_text(&violations));
            continue;
        }
        let key = (r.stock_code.clone(), r.date.clone());
        let spec = SeriesNode {
            label: "Indicator",
            owner_rel: "HAS_INDICATOR",
            props,
        };
        let (id, new) = upsert(graph, &mut ex.indicators, key, company, spec);
        if new {
            let d = build_calendar(graph, &r.date).expect("date checked");
            graph
                .create_edge(id, "MEASURED_ON", d, Props::new())
                .expect("endpoints exist");
        }
    }

    for at in statements {
        let r = &at.record;
        if let Err(reason) = r.check() {
            report.reject(at, reason);
            continue;
        }
        let Some(company) = find_company(graph, &r.stock_code) else {
            report.reject(at, format!("unknown stock_code {}", r.stock_code));
            continue;
        };
        let props = metric_props(&r.metrics());
        let violations = catalog.validate_node("FinancialStatements", &props);
        if !violations.is_empty() {
            report.reject(at, violations_text(&violations));
            continue;
        }
        let key = (r.stock_code.clone(), r.year, r.quarter);
        let spec = SeriesNode {
            label: "FinancialStatements",
            owner_rel: "HAS_FINANCIAL_STATEMENTS",
            props,
        };
        let (id, new) = upsert(graph, &mut ex.statements, key, company, spec);
        if new {
            let y = calendar::year_node(graph, r.year);
            graph
                .create_edge(id, "FOR_YEAR", y, Props::new())
                .expect("endpoints exist");
            if let Some(q) = r.quarter {
                let qn = calendar::quarter_node(graph, r.year, q);
                graph
                    .create_edge(id, "FOR_QUARTER", qn, Props::new())
                    .expect("endpoints exist");
            }
        }
    }

    report.set_loaded(&before, &graph.stats());
    report
}

/// Companies first, then time series.
pub fn ingest_all(graph: &mut PropertyGraph, catalog: &SchemaCatalog, input: &files::InputFiles) -> IngestReport {
    let mut report = IngestReport {
        rejected: input.rejected.clone(),
        ..Default::default()
    };
    report.merge(ingest_companies(graph, catalog, &input.companies));
    report.merge(ingest_timeseries(
        graph,
        catalog,
        &input.prices,
        &input.indicators,
        &input.statements,
    ));
    report
}

/// Reads an input directory and loads it.
pub fn ingest_dir(graph: &mut PropertyGraph, catalog: &SchemaCatalog, dir: &Path) -> Result<IngestReport, IngestError> {
    let input = files::read_dir(dir)?;
    Ok(ingest_all(graph, catalog, &input))
}

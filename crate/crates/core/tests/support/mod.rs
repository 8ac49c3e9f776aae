//! Shared integration-test helpers: the published listings, random graph and
//! query generators, and an exhaustive reference executor.
#![allow(dead_code)]

pub mod oracle;
pub mod random;
pub mod reference_schema;
pub mod stub;

use stockgraph::graph::PropertyGraph;
use stockgraph::ingest::fixture::{FixtureData, FixtureSpec};
use stockgraph::ingest::{ingest_all, IngestReport};
use stockgraph::schema::SchemaCatalog;

pub const INTRO_LISTING: &str = r#"MATCH (c:Company{stock_code:"005930"})-[:HAS_STOCK_PRICE]
->(sp:StockPrice)-[:RECORDED_ON]->(d:Date{date:"20230306"})
OPTIONAL MATCH (d)-[:IN_YEAR]->(y:Year)
OPTIONAL MATCH (d)-[:IN_QUARTER]->(q:Quarter)
OPTIONAL MATCH (c)-[r]-(connected)
RETURN c, r, connected, sp, d, y, q"#;

pub const CASE_STUDY_1: &str = r#"MATCH (c1:Company {stock_code: "005930"})-[:HAS_FINANCIAL_STATEMENTS]
->(fs1:FinancialStatements)-[:FOR_YEAR]->(y:Year)
MATCH (c2:Company {stock_code: "000660"})-[:HAS_FINANCIAL_STATEMENTS]
->(fs2:FinancialStatements)-[:FOR_YEAR]->(y)
WHERE y.year IN [2023, 2024, 2025]
RETURN
  y.year AS year,
  c1.stock_abbrv AS samsung_stock_abbrv,
  fs1.revenue AS samsung_revenue,
  fs1.operating_income AS samsung_operating_income,
  fs1.net_income AS samsung_net_income,
  c2.stock_abbrv AS skhynix_stock_abbrv,
  fs2.revenue AS skhynix_revenue,
  fs2.operating_income AS skhynix_operating_income,
  fs2.net_income AS skhynix_net_income
ORDER BY y.year ASC"#;

pub const CASE_STUDY_2: &str = r#"MATCH (sk:Company {stock_abbrv: "SK Hynix"})-[:BELONGS_TO]->(s:Sector)
<-[:BELONGS_TO]-(c:Company)
WHERE c.stock_code <> sk.stock_code
WITH c
MATCH (c)-[:HAS_INDICATOR]->(ind:Indicator)-[:MEASURED_ON]->(d:Date)
WHERE d.year IN [2023, 2024, 2025]
WITH c, ind, d
WHERE (ind.per < 10 OR ind.pbr < 1 OR ind.eps > 0)
RETURN
    c.stock_code AS stock_code, c.stock_abbrv AS stock_abbrv,
    d.year AS year, ind.per AS per, ind.pbr AS pbr, ind.eps AS eps
ORDER BY d.year, ind.per ASC, ind.pbr ASC, ind.eps DESC"#;

pub const CASE_STUDY_1_QUESTION: &str = "Analyze the performance trends by comparing the revenue, operating income, and net income of Samsung Electronics (stock code: 005930) with its competitor SK Hynix (stock code: 000660) for the years 2023, 2024, and 2025.";

pub const CASE_STUDY_2_QUESTION: &str = "Within the same industry as SK Hynix, identify companies with high growth potential or undervalued stocks based on PER, PBR, and EPS for the years 2023, 2024, and 2025.";

pub const LISTINGS: [(&str, &str); 3] = [
    ("intro", INTRO_LISTING),
    ("case study 1", CASE_STUDY_1),
    ("case study 2", CASE_STUDY_2),
];

pub fn load(data: &FixtureData) -> (PropertyGraph, IngestReport) {
    let mut g = PropertyGraph::new();
    let report = ingest_all(&mut g, &SchemaCatalog::market(), &data.to_input());
    (g, report)
}

pub fn demo_graph(seed: u64) -> PropertyGraph {
    load(&FixtureSpec::demo().generate(seed).expect("demo spec is valid")).0
}

/// Closed-form node and edge counts for a freshly ingested fixture spec.
pub fn expected_counts(
    spec: &FixtureSpec,
) -> (
    std::collections::BTreeMap<String, usize>,
    std::collections::BTreeMap<String, usize>,
) {
    use std::collections::{BTreeMap, BTreeSet};
    let c = spec.companies().count();
    let s = spec.sectors.iter().filter(|s| !s.companies.is_empty()).count();
    let y = (spec.last_year - spec.first_year + 1) as usize;
    let p = spec.price_days.len();
    let per_year_statements = if spec.quarterly_statements { 5 } else { 1 };
    let days: BTreeSet<&str> = spec
        .price_days
        .iter()
        .map(String::as_str)
        .chain([spec.indicator_day.as_str()])
        .collect();
    let mut quarters: BTreeSet<u32> = days
        .iter()
        .map(|d| (d[..2].parse::<u32>().unwrap() - 1) / 3 + 1)
        .collect();
    if spec.quarterly_statements {
        quarters.extend(1..=4);
    }
    let pairs: BTreeSet<(String, String)> = spec
        .competitor_pairs
        .iter()
        .filter(|(a, b)| a != b)
        .map(|(a, b)| {
            if a < b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            }
        })
        .collect();
    let nodes: BTreeMap<String, usize> = [
        ("Company", c),
        ("Sector", s),
        ("Year", y),
        ("Quarter", y * quarters.len()),
        ("Date", y * days.len()),
        ("StockPrice", c * y * p),
        ("Indicator", c * y),
        ("FinancialStatements", c * y * per_year_statements),
    ]
    .into_iter()
    .filter(|(_, n)| *n > 0)
    .map(|(k, n)| (k.to_string(), n))
    .collect();
    let edges: BTreeMap<String, usize> = [
        ("BELONGS_TO", c),
        ("COMPETES_WITH", 2 * pairs.len()),
        ("HAS_STOCK_PRICE", c * y * p),
        ("RECORDED_ON", c * y * p),
        ("HAS_INDICATOR", c * y),
        ("MEASURED_ON", c * y),
        ("HAS_FINANCIAL_STATEMENTS", c * y * per_year_statements),
        ("FOR_YEAR", c * y * per_year_statements),
        ("FOR_QUARTER", c * y * (per_year_statements - 1)),
        ("IN_YEAR", y * days.len()),
        ("IN_QUARTER", y * days.len()),
    ]
    .into_iter()
    .filter(|(_, n)| *n > 0)
    .map(|(k, n)| (k.to_string(), n))
    .collect();
    (nodes, edges)
}

fn company(code: &str, abbrv: &str, sector: &str) -> stockgraph::ingest::CompanyRecord {
    stockgraph::ingest::CompanyRecord {
        stock_code: code.into(),
        stock_nm: abbrv.into(),
        stock_abbrv: abbrv.into(),
        stock_nm_eng: abbrv.into(),
        listing_dt: "20000101".into(),
        market_nm: "KOSPI".into(),
        sector: sector.into(),
        outstanding_shares: 1_000_000,
        kospi200_item_yn: false,
        competitors: vec![],
    }
}

/// Two peers of SK Hynix with six indicator rows in 2023-2025, of which
/// exactly four satisfy `per < 10 OR pbr < 1 OR eps > 0` (one of the two
/// failures is false, the other unknown). Rows outside the year range, of
/// SK Hynix itself and of another sector are decoys.
pub fn screen_fixture() -> FixtureData {
    use stockgraph::ingest::IndicatorRecord;
    let ind = |code: &str, date: &str, per: Option<f64>, pbr: Option<f64>, eps: Option<f64>| IndicatorRecord {
        stock_code: code.into(),
        date: date.into(),
        per,
        pbr,
        eps,
    };
    FixtureData {
        companies: vec![
            company("000660", "SK Hynix", "Semiconductor"),
            company("111110", "Alpha", "Semiconductor"),
            company("222220", "Beta", "Semiconductor"),
            company("333330", "Gamma", "Chemicals"),
        ],
        prices: vec![],
        indicators: vec![
            ind("111110", "20231228", Some(8.0), Some(1.5), Some(-5.0)),
            ind("111110", "20241228", Some(15.0), Some(2.0), Some(-1.0)),
            ind("111110", "20251228", None, Some(0.5), None),
            ind("222220", "20231228", Some(12.0), Some(0.9), Some(100.0)),
            ind("222220", "20241228", None, Some(2.0), Some(-3.0)),
            ind("222220", "20251228", Some(9.0), Some(0.9), Some(50.0)),
            ind("111110", "20221228", Some(1.0), Some(0.1), Some(1.0)),
            ind("000660", "20241228", Some(1.0), Some(0.1), Some(1.0)),
            ind("333330", "20241228", Some(1.0), Some(0.1), Some(1.0)),
        ],
        statements: vec![],
    }
}

pub type ScreenRow = (String, i64, Option<f64>, Option<f64>, Option<f64>);

/// Direct filter and sort over the raw records of [`screen_fixture`].
pub fn screen_oracle(data: &FixtureData) -> Vec<ScreenRow> {
    use std::cmp::Ordering;
    let sector_of = |code: &str| {
        data.companies
            .iter()
            .find(|c| c.stock_code == code)
            .map(|c| c.sector.clone())
    };
    let anchor = data.companies.iter().find(|c| c.stock_abbrv == "SK Hynix").unwrap();
    let lt = |v: Option<f64>, t: f64| v.map(|v| v < t);
    let gt = |v: Option<f64>, t: f64| v.map(|v| v > t);
    let mut rows: Vec<ScreenRow> = data
        .indicators
        .iter()
        .filter(|r| r.stock_code != anchor.stock_code && sector_of(&r.stock_code) == Some(anchor.sector.clone()))
        .map(|r| (r.stock_code.clone(), r.date[..4].parse().unwrap(), r.per, r.pbr, r.eps))
        .filter(|(_, y, ..)| (2023..=2025).contains(y))
        .filter(|(_, _, per, pbr, eps)| {
            let parts = [lt(*per, 10.0), lt(*pbr, 1.0), gt(*eps, 0.0)];
            parts.contains(&Some(true))
        })
        .collect();
    // Null sorts last ascending, first descending
    let asc = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap(),
        (None, None) => Ordering::Equal,
        (None, _) => Ordering::Greater,
        (_, None) => Ordering::Less,
    };
    rows.sort_by(|a, b| {
        a.1.cmp(&b.1)
            .then(asc(a.2, b.2))
            .then(asc(a.3, b.3))
            .then(asc(b.4, a.4))
    });
    rows
}

/// Reads the case study 2 result table back into [`ScreenRow`]s.
pub fn screen_rows(t: &stockgraph::exec::ResultTable) -> Vec<ScreenRow> {
    let f = |r: usize, c: &str| t.value(r, c).and_then(|v| v.as_f64());
    (0..t.len())
        .map(|r| {
            (
                t.value(r, "stock_code").and_then(|v| v.as_text()).unwrap().to_string(),
                t.value(r, "year").and_then(|v| v.as_i64()).unwrap(),
                f(r, "per"),
                f(r, "pbr"),
                f(r, "eps"),
            )
        })
        .collect()
}

pub const CASE_STUDY_1_COLUMNS: [&str; 9] = [
    "year",
    "samsung_stock_abbrv",
    "samsung_revenue",
    "samsung_operating_income",
    "samsung_net_income",
    "skhynix_stock_abbrv",
    "skhynix_revenue",
    "skhynix_operating_income",
    "skhynix_net_income",
];

/// A randomized market that also lists the two case-study companies, so the
/// published questions apply to it.
pub fn randomized_market(seed: u64) -> FixtureSpec {
    use rand::{Rng, SeedableRng};
    use stockgraph::ingest::fixture::{CompanySpec, Profile};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_mul(7919));
    let mut spec = FixtureSpec::randomized(seed);
    spec.first_year = rng.random_range(2021..=2024);
    spec.last_year = spec.first_year + rng.random_range(1..=4);
    let demo = FixtureSpec::demo();
    let pick = |code: &str| -> CompanySpec {
        let mut c = demo.companies().find(|c| c.code == code).unwrap().clone();
        c.profile = [Profile::Value, Profile::Growth, Profile::Neutral][(seed % 3) as usize];
        c
    };
    let n = spec.sectors.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    spec.sectors[a].companies.push(pick("005930"));
    spec.sectors[b].companies.push(pick("000660"));
    spec.competitor_pairs.push(("005930".into(), "000660".into()));
    spec
}

/// Executes the translated question and the published listing; both must
/// give the same rows. Returns the row count.
pub fn translation_equivalent(
    engine: &stockgraph::engine::Engine,
    question: &str,
    listing: &str,
) -> Result<usize, String> {
    use stockgraph::exec::execute;
    let t = engine.translate(question, "template").map_err(|e| e.to_string())?;
    let ours = execute(engine.graph(), &t.ast);
    let theirs = execute(engine.graph(), &stockgraph::cypher::parse(listing).unwrap());
    if ours.columns != theirs.columns {
        return Err(format!("columns {:?} vs {:?}", ours.columns, theirs.columns));
    }
    if oracle::row_multiset(&ours) != oracle::row_multiset(&theirs) {
        return Err(format!(
            "{} rows vs {} rows\n{}",
            ours.len(),
            theirs.len(),
            t.query_text
        ));
    }
    Ok(ours.len())
}

/// Backend replies that must be rejected before execution.
pub const INVALID_QUERIES: [&str; 8] = [
    "DROP ALL",
    "MATCH (n) DETACH DELETE n",
    "CREATE (c:Company {stock_code: \"1\"})",
    "MATCH (c:Company RETURN c",
    "MATCH (c:Corporation) RETURN c.stock_code AS code",
    "MATCH (c:Company)-[:OWNS]->(d:Company) RETURN d.stock_code AS code",
    "MATCH (c:Company) RETURN c.ticker AS t",
    "MATCH (c:Company) RETURN x.stock_code AS code",
];

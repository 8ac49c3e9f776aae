//! The published schema tables, typed in by hand.

use std::collections::BTreeSet;

use stockgraph::schema::SchemaCatalog;

/// Node and relationship types as printed in the source schema table.
pub const NODE_TYPES: [&str; 8] = [
    "Company",
    "Sector",
    "Indicator",
    "Stock Price",
    "Financial Statements",
    "Date",
    "Quarter",
    "Year",
];

pub const REL_TYPES: [&str; 11] = [
    "HAS_STOCK_PRICE",
    "HAS_INDICATOR",
    "HAS_FINANCIAL_STATEMENTS",
    "BELONGS_TO",
    "COMPETES_WITH",
    "RECORDED_ON",
    "MEASURED_ON",
    "FOR_QUARTER",
    "FOR_YEAR",
    "IN_YEAR",
    "IN_QUARTER",
];

/// Node properties as printed in the source property table.
pub const PROPERTIES: [(&str, &[&str]); 8] = [
    (
        "Company",
        &[
            "stock_code",
            "stock_nm",
            "stock_abbrv",
            "stock_nm_eng",
            "listing_dt",
            "compete_stock_nm_li",
            "compete_stock_code_li",
            "market_nm",
            "outstanding_shares",
            "kospi200_item_yn",
        ],
    ),
    ("Stock", &["stck_oprc", "stck_clpr", "stck_hgpr", "stck_lwpr"]),
    ("Indicator", &["pbr", "per", "EPS"]),
    ("Sector", &["stock_sector_nm"]),
    (
        "Financial Statements",
        &[
            "revenue",
            "operating_income",
            "net_income",
            "total_assets",
            "total_liabilities",
            "total_equity",
            "capital_stock",
        ],
    ),
    ("Date", &["date", "year", "month", "day"]),
    ("Quarter", &["year", "quarter"]),
    ("Year", &["year"]),
];

/// Endpoints fixed by the relationship names and the printed queries.
pub const ENDPOINTS: [(&str, &str, &str); 11] = [
    ("HAS_STOCK_PRICE", "Company", "StockPrice"),
    ("HAS_INDICATOR", "Company", "Indicator"),
    ("HAS_FINANCIAL_STATEMENTS", "Company", "FinancialStatements"),
    ("BELONGS_TO", "Company", "Sector"),
    ("COMPETES_WITH", "Company", "Company"),
    ("RECORDED_ON", "StockPrice", "Date"),
    ("MEASURED_ON", "Indicator", "Date"),
    ("FOR_QUARTER", "FinancialStatements", "Quarter"),
    ("FOR_YEAR", "FinancialStatements", "Year"),
    ("IN_YEAR", "Date", "Year"),
    ("IN_QUARTER", "Date", "Quarter"),
];

/// The two documented renamings: labels are single tokens as the queries use
/// them, and the indicator's EPS is stored as `eps`.
pub fn label(printed: &str) -> String {
    match printed {
        "Stock" => "StockPrice".into(),
        other => other.replace(' ', ""),
    }
}

pub fn property(printed: &str) -> String {
    match printed {
        "EPS" => "eps".into(),
        other => other.into(),
    }
}

/// Human-readable differences between the catalog and the printed tables;
/// empty when they agree.
pub fn catalog_diff(c: &SchemaCatalog) -> Vec<String> {
    let mut out = Vec::new();
    let want: BTreeSet<String> = NODE_TYPES.iter().map(|n| label(n)).collect();
    let got: BTreeSet<String> = c.node_types.iter().map(|n| n.name.to_string()).collect();
    for n in want.symmetric_difference(&got) {
        out.push(format!("node type {n}"));
    }
    let want: BTreeSet<&str> = REL_TYPES.into_iter().collect();
    let got: BTreeSet<&str> = c.rel_types.iter().map(|r| r.name).collect();
    for r in want.symmetric_difference(&got) {
        out.push(format!("relationship type {r}"));
    }
    for (printed, props) in PROPERTIES {
        let Some(nt) = c.node_type(&label(printed)) else {
            continue;
        };
        let want: BTreeSet<String> = props.iter().map(|p| property(p)).collect();
        let got: BTreeSet<String> = nt.properties.iter().map(|p| p.name.to_string()).collect();
        for p in want.symmetric_difference(&got) {
            out.push(format!("{}.{p}", nt.name));
        }
    }
    for (name, src, dst) in ENDPOINTS {
        match c.rel_type(name) {
            Some(r) if (r.src, r.dst) != (src, dst) => {
                out.push(format!("{name} runs {}->{}, expected {src}->{dst}", r.src, r.dst))
            }
            _ => {}
        }
    }
    out
}

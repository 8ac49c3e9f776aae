//! The stock-market graph schema as data.
//!
//! Eight node types, eleven relationship types with fixed endpoint types, and
//! a property catalog per node type. Used to validate ingestion, to check
//! generated queries, and to describe the graph to external query
//! generators.

use std::fmt::Write as _;

use serde::Serialize;

use crate::value::{Props, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValueKind {
    Text,
    Integer,
    /// Integer or Float.
    Number,
    Boolean,
    TextList,
}

impl ValueKind {
    pub fn accepts(self, v: &Value) -> bool {
        matches!(
            (self, v),
            (_, Value::Null)
                | (ValueKind::Text, Value::Text(_))
                | (ValueKind::Integer, Value::Integer(_))
                | (ValueKind::Number, Value::Integer(_) | Value::Float(_))
                | (ValueKind::Boolean, Value::Boolean(_))
                | (ValueKind::TextList, Value::TextList(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyDef {
    pub name: &'static str,
    pub kind: ValueKind,
    pub required: bool,
    pub description: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeType {
    pub name: &'static str,
    pub properties: Vec<PropertyDef>,
}

impl NodeType {
    pub fn property(&self, name: &str) -> Option<&PropertyDef> {
        self.properties.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelType {
    pub name: &'static str,
    pub src: &'static str,
    pub dst: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownLabel {
        label: String,
    },
    UnknownProperty {
        label: String,
        property: String,
    },
    WrongKind {
        label: String,
        property: String,
        expected: ValueKind,
        found: String,
    },
    MissingRequired {
        label: String,
        property: String,
    },
    UnknownRelType {
        rel_type: String,
    },
    EndpointMismatch {
        rel_type: String,
        expected_src: String,
        expected_dst: String,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::UnknownLabel { label } => write!(f, "unknown node label {label}"),
            Violation::UnknownProperty { label, property } => {
                write!(f, "unknown property {label}.{property}")
            }
            Violation::WrongKind {
                label,
                property,
                expected,
                found,
            } => {
                write!(f, "{label}.{property} must be {expected:?}, found {found}")
            }
            Violation::MissingRequired { label, property } => {
                write!(f, "missing required property {label}.{property}")
            }
            Violation::UnknownRelType { rel_type } => write!(f, "unknown relationship type {rel_type}"),
            Violation::EndpointMismatch {
                rel_type,
                expected_src,
                expected_dst,
            } => write!(f, "{rel_type} must connect {expected_src} -> {expected_dst}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemaCatalog {
    pub node_types: Vec<NodeType>,
    pub rel_types: Vec<RelType>,
}

const fn prop(name: &'static str, kind: ValueKind, required: bool, description: &'static str) -> PropertyDef {
    PropertyDef {
        name,
        kind,
        required,
        description,
    }
}

impl Default for SchemaCatalog {
    fn default() -> Self {
        Self::market()
    }
}

impl SchemaCatalog {
    /// The stock-market schema.
    pub fn market() -> Self {
        use ValueKind::*;
        let node_types = vec![
            NodeType {
                name: "Company",
                properties: vec![
                    prop("stock_code", Text, true, "Stock code"),
                    prop("stock_nm", Text, false, "Company name"),
                    prop("stock_abbrv", Text, false, "Shortened company name"),
                    prop("stock_nm_eng", Text, false, "Company name (English)"),
                    prop("listing_dt", Text, false, "Listing date (YYYYMMDD)"),
                    prop(
                        "compete_stock_nm_li",
                        TextList,
                        false,
                        "List of competitor company names",
                    ),
                    prop(
                        "compete_stock_code_li",
                        TextList,
                        false,
                        "List of competitor stock codes",
                    ),
                    prop("market_nm", Text, false, "Market name"),
                    prop("outstanding_shares", Integer, false, "Number of outstanding shares"),
                    prop("kospi200_item_yn", Boolean, false, "KOSPI 200 inclusion"),
                ],
            },
            NodeType {
                name: "StockPrice",
                properties: vec![
                    prop("stck_oprc", Number, false, "Open price"),
                    prop("stck_clpr", Number, false, "Close price"),
                    prop("stck_hgpr", Number, false, "High price"),
                    prop("stck_lwpr", Number, false, "Low price"),
                ],
            },
            NodeType {
                name: "Indicator",
                properties: vec![
                    prop("pbr", Number, false, "Price-to-Book Ratio"),
                    prop("per", Number, false, "Price-to-Earnings Ratio"),
                    prop("eps", Number, false, "Earnings Per Share"),
                ],
            },
            NodeType {
                name: "Sector",
                properties: vec![prop(
                    "stock_sector_nm",
                    Text,
                    true,
                    "Standard industry classification name",
                )],
            },
            NodeType {
                name: "FinancialStatements",
                properties: vec![
                    prop("revenue", Number, false, "Revenue"),
                    prop("operating_income", Number, false, "Operating income"),
                    prop("net_income", Number, false, "Net income"),
                    prop("total_assets", Number, false, "Total assets"),
                    prop("total_liabilities", Number, false, "Total liabilities"),
                    prop("total_equity", Number, false, "Total equity"),
                    prop("capital_stock", Number, false, "Capital stock"),
                ],
            },
            NodeType {
                name: "Date",
                properties: vec![
                    prop("date", Text, true, "Date (YYYYMMDD)"),
                    prop("year", Integer, false, "Year"),
                    prop("month", Integer, false, "Month"),
                    prop("day", Integer, false, "Day"),
                ],
            },
            NodeType {
                name: "Quarter",
                properties: vec![
                    prop("year", Integer, true, "Year"),
                    prop("quarter", Integer, true, "Quarter (numeric)"),
                ],
            },
            NodeType {
                name: "Year",
                properties: vec![prop("year", Integer, true, "Year")],
            },
        ];
        let rel = |name, src, dst| RelType { name, src, dst };
        let rel_types = vec![
            rel("HAS_STOCK_PRICE", "Company", "StockPrice"),
            rel("HAS_INDICATOR", "Company", "Indicator"),
            rel("HAS_FINANCIAL_STATEMENTS", "Company", "FinancialStatements"),
            rel("BELONGS_TO", "Company", "Sector"),
            rel("COMPETES_WITH", "Company", "Company"),
            rel("RECORDED_ON", "StockPrice", "Date"),
            rel("MEASURED_ON", "Indicator", "Date"),
            rel("FOR_QUARTER", "FinancialStatements", "Quarter"),
            rel("FOR_YEAR", "FinancialStatements", "Year"),
            rel("IN_YEAR", "Date", "Year"),
            rel("IN_QUARTER", "Date", "Quarter"),
        ];
        SchemaCatalog { node_types, rel_types }
    }

    pub fn node_type(&self, label: &str) -> Option<&NodeType> {
        self.node_types.iter().find(|n| n.name == label)
    }

    pub fn rel_type(&self, name: &str) -> Option<&RelType> {
        self.rel_types.iter().find(|r| r.name == name)
    }

    /// True when some node type declares a property with this name.
    pub fn has_property(&self, name: &str) -> bool {
        self.node_types.iter().any(|n| n.property(name).is_some())
    }

    /// Checks a node's label and properties. An empty list means valid.
    pub fn validate_node(&self, label: &str, props: &Props) -> Vec<Violation> {
        let Some(nt) = self.node_type(label) else {
            return vec![Violation::UnknownLabel {
                label: label.to_string(),
            }];
        };
        let mut out = Vec::new();
        for (key, value) in props {
            match nt.property(key) {
                None => out.push(Violation::UnknownProperty {
                    label: label.to_string(),
                    property: key.clone(),
                }),
                Some(def) if !def.kind.accepts(value) => out.push(Violation::WrongKind {
                    label: label.to_string(),
                    property: key.clone(),
                    expected: def.kind,
                    found: value.kind_name().to_string(),
                }),
                Some(_) => {}
            }
        }
        for def in nt.properties.iter().filter(|d| d.required) {
            if props.get(def.name).is_none_or(Value::is_null) {
                out.push(Violation::MissingRequired {
                    label: label.to_string(),
                    property: def.name.to_string(),
                });
            }
        }
        out
    }

    /// Checks that `rel_type` may connect nodes with the given label sets.
    pub fn validate_edge<'a>(
        &self,
        rel_type: &str,
        src_labels: impl IntoIterator<Item = &'a str>,
        dst_labels: impl IntoIterator<Item = &'a str>,
    ) -> Result<(), Violation> {
        let Some(rt) = self.rel_type(rel_type) else {
            return Err(Violation::UnknownRelType {
                rel_type: rel_type.to_string(),
            });
        };
        let src_ok = src_labels.into_iter().any(|l| l == rt.src);
        let dst_ok = dst_labels.into_iter().any(|l| l == rt.dst);
        if src_ok && dst_ok {
            Ok(())
        } else {
            Err(Violation::EndpointMismatch {
                rel_type: rel_type.to_string(),
                expected_src: rt.src.to_string(),
                expected_dst: rt.dst.to_string(),
            })
        }
    }

    /// Plain-text description of every node type and relationship type.
    pub fn schema_text(&self) -> String {
        let mut s = String::from("Node types:\n");
        for nt in &self.node_types {
            let _ = writeln!(s, "\n{}", nt.name);
            for p in &nt.properties {
                let req = if p.required { ", required" } else { "" };
                let _ = writeln!(s, "  - {} ({:?}{req}): {}", p.name, p.kind, p.description);
            }
        }
        s.push_str("\nRelationship types:\n");
        for rt in &self.rel_types {
            let _ = writeln!(s, "{}: {} -> {}", rt.name, rt.src, rt.dst);
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("catalog serializes")
    }
}

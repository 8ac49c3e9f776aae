use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::json;

use super::eval::Datum;
use crate::graph::{Edge, Node, PropertyGraph};
use crate::value::Value;

/// A result cell: a full copy of a node or edge, a scalar, or a list.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Node(Node),
    Edge(Edge),
    Value(Value),
    List(Vec<Cell>),
}

impl Cell {
    pub(crate) fn from_datum(graph: &PropertyGraph, d: &Datum) -> Cell {
        match d {
            Datum::Value(v) => Cell::Value(v.clone()),
            Datum::Node(id) => graph
                .node(*id)
                .cloned()
                .map(Cell::Node)
                .unwrap_or(Cell::Value(Value::Null)),
            Datum::Edge(id) => graph
                .edge(*id)
                .cloned()
                .map(Cell::Edge)
                .unwrap_or(Cell::Value(Value::Null)),
            Datum::List(items) => Cell::List(items.iter().map(|d| Cell::from_datum(graph, d)).collect()),
        }
    }

    pub fn as_value(&self) -> Option<&Value> {
        match self {
            Cell::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Cell::Value(Value::Null))
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Value(v) => serde_json::to_value(v).unwrap_or(serde_json::Value::Null),
            Cell::Node(n) => json!({
                "id": n.id.0,
                "labels": n.labels,
                "props": n.props,
            }),
            Cell::Edge(e) => json!({
                "id": e.id.0,
                "src": e.src.0,
                "dst": e.dst.0,
                "type": e.rel_type,
                "props": e.props,
            }),
            Cell::List(items) => serde_json::Value::Array(items.iter().map(Cell::to_json).collect()),
        }
    }

    /// Compact text form used by the aligned table renderer.
    pub fn display(&self) -> String {
        match self {
            Cell::Value(v) => v.to_string(),
            Cell::Node(n) => {
                let labels: String = n.labels.iter().map(|l| format!(":{l}")).collect();
                let props: Vec<String> = n
                    .props
                    .iter()
                    .map(|(k, v)| format!("{k}: {}", crate::cypher::render::render_literal(v)))
                    .collect();
                format!("({}{labels} {{{}}})", n.id, props.join(", "))
            }
            Cell::Edge(e) => format!("[{}:{} {}->{}]", e.id, e.rel_type, e.src, e.dst),
            Cell::List(items) => {
                let inner: Vec<_> = items.iter().map(Cell::display).collect();
                format!("[{}]", inner.join(", "))
            }
        }
    }
}

/// Ordered rows of named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Comparisons between incompatible kinds that were read as Null.
    pub type_mismatches: usize,
}

impl ResultTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn cell(&self, row: usize, column: &str) -> Option<&Cell> {
        let c = self.column_index(column)?;
        self.rows.get(row)?.get(c)
    }

    pub fn value(&self, row: usize, column: &str) -> Option<&Value> {
        self.cell(row, column)?.as_value()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// JSON array of row objects keyed by column name, in column order.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("result tables always serialize")
    }

    /// Aligned plain-text rendering with a header row.
    pub fn to_text(&self) -> String {
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::display).collect())
            .collect();
        let n = self.rows.len();
        render_aligned(&self.columns, &body) + &format!("({n} {})\n", if n == 1 { "row" } else { "rows" })
    }
}

pub(crate) fn render_aligned(columns: &[String], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = columns.iter().map(|c| c.chars().count()).collect();
    for row in body {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(columns);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for row in body {
        out.push_str(&line(row));
    }
    out
}

struct RowRef<'a>(&'a [String], &'a [Cell]);

impl Serialize for RowRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (name, cell) in self.0.iter().zip(self.1) {
            m.serialize_entry(name, &cell.to_json())?;
        }
        m.end()
    }
}

impl Serialize for ResultTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for row in &self.rows {
            seq.serialize_element(&RowRef(&self.columns, row))?;
        }
        seq.end()
    }
}

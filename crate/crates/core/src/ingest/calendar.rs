use chrono::Datelike;

use super::records::parse_date;
use super::IngestError;
use crate::graph::{Direction, NodeId, PropertyGraph};
use crate::value::{props, Value};

pub fn quarter_of(month: u32) -> i64 {
    i64::from((month - 1) / 3 + 1)
}

pub(crate) fn year_node(graph: &mut PropertyGraph, year: i64) -> NodeId {
    let found = graph.find_nodes("Year", "year", &Value::Integer(year));
    if let Some(id) = found.first() {
        return *id;
    }
    graph
        .create_node(["Year"], props([("year", year)]))
        .expect("non-empty label set")
}

pub(crate) fn quarter_node(graph: &mut PropertyGraph, year: i64, quarter: i64) -> NodeId {
    let found = graph.find_nodes("Quarter", "year", &Value::Integer(year));
    let hit = found.into_iter().find(|id| {
        graph
            .node(*id)
            .and_then(|n| n.prop("quarter"))
            .is_some_and(|q| q.as_i64() == Some(quarter))
    });
    if let Some(id) = hit {
        return id;
    }
    graph
        .create_node(["Quarter"], props([("year", year), ("quarter", quarter)]))
        .expect("non-empty label set")
}

fn ensure_edge(graph: &mut PropertyGraph, src: NodeId, rel: &str, dst: NodeId) {
    let exists = graph
        .neighbors(src, Direction::Out, Some(&[rel]))
        .expect("node exists")
        .iter()
        .any(|e| e.dst == dst);
    if !exists {
        graph
            .create_edge(src, rel, dst, Default::default())
            .expect("endpoints exist");
    }
}

/// Returns the Date node for `date_text`, creating it and its Year and
/// Quarter context on first use. Repeated calls return the same node and add
/// nothing.
pub fn build_calendar(graph: &mut PropertyGraph, date_text: &str) -> Result<NodeId, IngestError> {
    let date = parse_date(date_text).ok_or_else(|| IngestError::BadDate(date_text.to_string()))?;
    let year = i64::from(date.year());
    let month = date.month();
    let existing = graph.find_nodes("Date", "date", &Value::from(date_text));
    let d = match existing.first() {
        Some(id) => *id,
        None => graph
            .create_node(
                ["Date"],
                props([
                    ("date", Value::from(date_text)),
                    ("year", Value::Integer(year)),
                    ("month", Value::Integer(i64::from(month))),
                    ("day", Value::Integer(i64::from(date.day()))),
                ]),
            )
            .expect("non-empty label set"),
    };
    let y = year_node(graph, year);
    let q = quarter_node(graph, year, quarter_of(month));
    ensure_edge(graph, d, "IN_YEAR", y);
    ensure_edge(graph, d, "IN_QUARTER", q);
    Ok(d)
}

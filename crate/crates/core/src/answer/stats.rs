use std::collections::BTreeMap;

use serde::Serialize;

use super::ComposeError;
use crate::exec::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Baseline {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub n: usize,
}

impl Baseline {
    pub fn of(values: &[f64]) -> Option<Baseline> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Baseline {
            mean,
            std: var.sqrt(),
            n: values.len(),
        })
    }
}

pub const SCREEN_METRICS: [&str; 3] = ["per", "pbr", "eps"];

/// Mean and population standard deviation per (year, metric) over the
/// non-Null cells of a screen table. Groups without values are absent.
pub fn sector_stats(table: &ResultTable) -> Result<BTreeMap<(i64, String), Baseline>, ComposeError> {
    let missing: Vec<String> = ["year", "per", "pbr", "eps"]
        .iter()
        .filter(|c| table.column_index(c).is_none())
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ComposeError::MissingColumns(missing));
    }
    let mut groups: BTreeMap<(i64, String), Vec<f64>> = BTreeMap::new();
    for row in 0..table.len() {
        let Some(year) = table.value(row, "year").and_then(|v| v.as_i64()) else {
            continue;
        };
        for m in SCREEN_METRICS {
            if let Some(v) = table.value(row, m).and_then(|v| v.as_f64()).filter(|v| v.is_finite()) {
                groups.entry((year, m.to_string())).or_default().push(v);
            }
        }
    }
    Ok(groups
        .into_iter()
        .filter_map(|(k, vs)| Baseline::of(&vs).map(|b| (k, b)))
        .collect())
}

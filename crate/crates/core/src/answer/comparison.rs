//! Multi-year metric comparison between companies.

use std::collections::BTreeMap;

use serde::Serialize;

use super::format::{currency, percent};
use super::{ComposeError, Section, TableSlice};
use crate::exec::ResultTable;
use crate::translate::Metric;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendStat {
    pub company: String,
    pub metric: String,
    pub year: i64,
    pub value: f64,
    /// Percent change from the previous year; absent for the first year or
    /// when the previous value is missing or zero.
    pub yoy_pct: Option<f64>,
}

/// `100 * (v - prev) / |prev|`, or `None` when `prev` is missing or zero.
pub fn yoy(prev: Option<f64>, v: f64) -> Option<f64> {
    let p = prev?;
    (p != 0.0).then(|| 100.0 * (v - p) / p.abs())
}

/// Per-company series in long form.
#[derive(Debug, Default)]
struct LongForm {
    companies: Vec<String>,
    years: Vec<i64>,
    metrics: Vec<Metric>,
    values: BTreeMap<(String, i64, Metric), Option<f64>>,
}

fn long_form(table: &ResultTable) -> Result<LongForm, ComposeError> {
    if table.column_index("year").is_none() {
        return Err(ComposeError::ShapeMismatch("no year column".into()));
    }
    let prefixes: Vec<String> = table
        .columns
        .iter()
        .filter_map(|c| c.strip_suffix("_stock_abbrv").map(String::from))
        .collect();
    if prefixes.is_empty() {
        return Err(ComposeError::ShapeMismatch("no <company>_stock_abbrv columns".into()));
    }
    let mut lf = LongForm::default();
    for m in Metric::ALL {
        if prefixes
            .iter()
            .any(|p| table.column_index(&format!("{p}_{}", m.property())).is_some())
        {
            lf.metrics.push(m);
        }
    }
    if lf.metrics.is_empty() {
        return Err(ComposeError::ShapeMismatch("no metric columns".into()));
    }
    for row in 0..table.len() {
        let Some(year) = table.value(row, "year").and_then(|v| v.as_i64()) else {
            continue;
        };
        if !lf.years.contains(&year) {
            lf.years.push(year);
        }
        for p in &prefixes {
            let company = table
                .value(row, &format!("{p}_stock_abbrv"))
                .and_then(|v| v.as_text())
                .unwrap_or(p)
                .to_string();
            if !lf.companies.contains(&company) {
                lf.companies.push(company.clone());
            }
            for m in &lf.metrics {
                let v = table
                    .value(row, &format!("{p}_{}", m.property()))
                    .and_then(|v| v.as_f64())
                    .filter(|v| v.is_finite());
                let slot = lf.values.entry((company.clone(), year, *m)).or_insert(None);
                if slot.is_none() {
                    *slot = v;
                }
            }
        }
    }
    lf.years.sort_unstable();
    Ok(lf)
}

/// Leader of one (metric, year): a single company, a tie, or nobody.
#[derive(Debug, Clone, PartialEq)]
enum Lead {
    One(String, f64),
    Tied(Vec<String>, f64),
    None,
}

fn leader(lf: &LongForm, m: Metric, year: i64) -> Lead {
    let present: Vec<(&String, f64)> = lf
        .companies
        .iter()
        .filter_map(|c| lf.values.get(&(c.clone(), year, m)).copied().flatten().map(|v| (c, v)))
        .collect();
    let Some(max) = present.iter().map(|(_, v)| *v).reduce(f64::max) else {
        return Lead::None;
    };
    let top: Vec<String> = present
        .iter()
        .filter(|(_, v)| *v == max)
        .map(|(c, _)| (*c).clone())
        .collect();
    if top.len() == 1 {
        Lead::One(top[0].clone(), max)
    } else {
        Lead::Tied(top, max)
    }
}

fn join_names(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

pub fn trend_stats(table: &ResultTable) -> Result<Vec<TrendStat>, ComposeError> {
    let lf = long_form(table)?;
    Ok(trends(&lf))
}

fn trends(lf: &LongForm) -> Vec<TrendStat> {
    let mut out = Vec::new();
    for m in &lf.metrics {
        for c in &lf.companies {
            let mut prev = None;
            for y in &lf.years {
                let v = lf.values.get(&(c.clone(), *y, *m)).copied().flatten();
                if let Some(v) = v {
                    out.push(TrendStat {
                        company: c.clone(),
                        metric: m.property().into(),
                        year: *y,
                        value: v,
                        yoy_pct: yoy(prev, v),
                    });
                }
                prev = v;
            }
        }
    }
    out
}

/// One section per metric, then a revenue scale section.
pub fn summarize_comparison(table: &ResultTable) -> Result<Vec<Section>, ComposeError> {
    let lf = long_form(table)?;
    let stats = trends(&lf);
    let mut sections = Vec::new();
    for m in &lf.metrics {
        let mut columns = vec!["year".to_string()];
        for c in &lf.companies {
            columns.push(c.clone());
            columns.push(format!("{c} YoY"));
        }
        columns.push("leader".into());
        let mut rows = Vec::new();
        let mut narrative = Vec::new();
        let mut leads = Vec::new();
        for y in &lf.years {
            let mut row = vec![y.to_string()];
            for c in &lf.companies {
                let s = stats
                    .iter()
                    .find(|s| s.company == *c && s.year == *y && s.metric == m.property());
                row.push(s.map(|s| currency(s.value)).unwrap_or_default());
                row.push(s.and_then(|s| s.yoy_pct).map(percent).unwrap_or_default());
                if s.is_none() {
                    narrative.push(format!(
                        "{c} has no {} value in {y}; it is left out of that year's comparison.",
                        m.title().to_lowercase()
                    ));
                }
            }
            let lead = leader(&lf, *m, *y);
            match &lead {
                Lead::One(c, v) => {
                    row.push(c.clone());
                    narrative.push(format!("In {y}, {c} leads with {}.", currency(*v)));
                }
                Lead::Tied(cs, v) => {
                    row.push("tied".into());
                    narrative.push(format!("In {y}, {} are tied at {}.", join_names(cs), currency(*v)));
                }
                Lead::None => row.push(String::new()),
            }
            leads.push((*y, lead));
            rows.push(row);
        }
        for s in stats.iter().filter(|s| s.metric == m.property()) {
            if let Some(p) = s.yoy_pct {
                let dir = if p >= 0.0 { "rises" } else { "falls" };
                narrative.push(format!(
                    "{} {dir} {} year over year in {}.",
                    s.company,
                    percent(p),
                    s.year
                ));
            }
        }
        if let (Some((y0, Lead::One(a, _))), Some((yn, Lead::One(b, _)))) = (leads.first(), leads.last()) {
            if a != b {
                narrative.push(format!(
                    "The lead in {} changes from {a} in {y0} to {b} in {yn}.",
                    m.title().to_lowercase()
                ));
            }
        }
        sections.push(Section {
            heading: m.title().into(),
            narrative,
            table: Some(TableSlice { columns, rows }),
        });
    }

    if lf.metrics.contains(&Metric::Revenue) {
        let mut totals: Vec<(String, f64, usize)> = lf
            .companies
            .iter()
            .map(|c| {
                let vals: Vec<f64> = lf
                    .years
                    .iter()
                    .filter_map(|y| lf.values.get(&(c.clone(), *y, Metric::Revenue)).copied().flatten())
                    .collect();
                (c.clone(), vals.iter().sum(), vals.len())
            })
            .collect();
        totals.retain(|(_, _, n)| *n > 0);
        let mut narrative = Vec::new();
        if let Some(max) = totals.iter().map(|t| t.1).reduce(f64::max) {
            let top: Vec<String> = totals.iter().filter(|t| t.1 == max).map(|t| t.0.clone()).collect();
            if top.len() == 1 {
                narrative.push(format!(
                    "{} has the larger overall revenue scale, with {} in total.",
                    top[0],
                    currency(max)
                ));
            } else {
                narrative.push(format!(
                    "{} have the same overall revenue scale, {} in total.",
                    join_names(&top),
                    currency(max)
                ));
            }
        }
        sections.push(Section {
            heading: "Scale".into(),
            narrative,
            table: Some(TableSlice {
                columns: vec!["company".into(), "total revenue".into(), "years".into()],
                rows: totals
                    .iter()
                    .map(|(c, v, n)| vec![c.clone(), currency(*v), n.to_string()])
                    .collect(),
            }),
        });
    }
    Ok(sections)
}

//! Sector screen classification.
//!
//! For each company, with baselines averaged over the years the company has
//! data for:
//!
//! * Undervalued: mean PER below the sector mean PER, mean PBR below the
//!   sector mean PBR, and every available EPS positive.
//! * Growth: not Undervalued, EPS strictly increasing across at least two
//!   years, and mean PER at most the sector mean plus one standard deviation.
//! * Neither: everything else.

use std::collections::BTreeMap;

use serde::Serialize;

use super::format::{currency, ratio};
use super::stats::{sector_stats, Baseline};
use super::{ComposeError, Section, TableSlice};
use crate::exec::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Bucket {
    Undervalued,
    Growth,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearEvidence {
    pub year: i64,
    pub per: Option<f64>,
    pub pbr: Option<f64>,
    pub eps: Option<f64>,
    pub per_baseline: Option<Baseline>,
    pub pbr_baseline: Option<Baseline>,
    pub eps_baseline: Option<Baseline>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub years: Vec<YearEvidence>,
    pub mean_per: Option<f64>,
    pub mean_pbr: Option<f64>,
    /// Sector mean PER averaged over the years with a PER value.
    pub sector_per: Option<f64>,
    /// Sector mean PER plus one standard deviation, averaged likewise.
    pub sector_per_band: Option<f64>,
    pub sector_pbr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreenClassification {
    pub company_code: String,
    pub company_name: String,
    pub bucket: Bucket,
    pub evidence: Evidence,
}

fn mean(vs: &[f64]) -> Option<f64> {
    (!vs.is_empty()).then(|| vs.iter().sum::<f64>() / vs.len() as f64)
}

fn evidence(years: Vec<YearEvidence>) -> Evidence {
    let per: Vec<&YearEvidence> = years.iter().filter(|y| y.per.is_some()).collect();
    let pbr: Vec<&YearEvidence> = years.iter().filter(|y| y.pbr.is_some()).collect();
    let avg = |ys: &[&YearEvidence], f: &dyn Fn(&YearEvidence) -> Option<f64>| {
        let vs: Vec<f64> = ys.iter().filter_map(|y| f(y)).collect();
        if vs.len() == ys.len() {
            mean(&vs)
        } else {
            None
        }
    };
    Evidence {
        mean_per: avg(&per, &|y| y.per),
        mean_pbr: avg(&pbr, &|y| y.pbr),
        sector_per: avg(&per, &|y| y.per_baseline.map(|b| b.mean)),
        sector_per_band: avg(&per, &|y| y.per_baseline.map(|b| b.mean + b.std)),
        sector_pbr: avg(&pbr, &|y| y.pbr_baseline.map(|b| b.mean)),
        years,
    }
}

/// Applies the bucket rules to one company's evidence.
pub fn bucket_of(e: &Evidence) -> Bucket {
    let lt = |a: Option<f64>, b: Option<f64>| matches!((a, b), (Some(a), Some(b)) if a < b);
    let eps: Vec<f64> = e.years.iter().filter_map(|y| y.eps).collect();
    let undervalued = lt(e.mean_per, e.sector_per) && lt(e.mean_pbr, e.sector_pbr) && eps.iter().all(|v| *v > 0.0);
    if undervalued {
        return Bucket::Undervalued;
    }
    let rising = eps.len() >= 2 && eps.windows(2).all(|w| w[1] > w[0]);
    let within_band = matches!((e.mean_per, e.sector_per_band), (Some(a), Some(b)) if a <= b);
    if rising && within_band {
        Bucket::Growth
    } else {
        Bucket::Neither
    }
}

/// Classifies every company in a screen table.
pub fn classify_screen(table: &ResultTable) -> Result<Vec<ScreenClassification>, ComposeError> {
    let baselines = sector_stats(table)?;
    for c in ["stock_code", "stock_abbrv"] {
        if table.column_index(c).is_none() {
            return Err(ComposeError::ShapeMismatch(format!("no {c} column")));
        }
    }
    // (code) -> (name, year -> metric -> values)
    type Values = BTreeMap<i64, [Vec<f64>; 3]>;
    let mut companies: BTreeMap<String, (String, Values)> = BTreeMap::new();
    for row in 0..table.len() {
        let Some(code) = table.value(row, "stock_code").and_then(|v| v.as_text()) else {
            continue;
        };
        let Some(year) = table.value(row, "year").and_then(|v| v.as_i64()) else {
            continue;
        };
        let name = table
            .value(row, "stock_abbrv")
            .and_then(|v| v.as_text())
            .unwrap_or(code)
            .to_string();
        let entry = companies
            .entry(code.to_string())
            .or_insert_with(|| (name, BTreeMap::new()));
        let slot = entry.1.entry(year).or_default();
        for (i, m) in ["per", "pbr", "eps"].iter().enumerate() {
            if let Some(v) = table.value(row, m).and_then(|v| v.as_f64()).filter(|v| v.is_finite()) {
                slot[i].push(v);
            }
        }
    }
    let base = |y: i64, m: &str| baselines.get(&(y, m.to_string())).copied();
    let mut out: Vec<ScreenClassification> = companies
        .into_iter()
        .map(|(code, (name, years))| {
            let years: Vec<YearEvidence> = years
                .into_iter()
                .map(|(y, [per, pbr, eps])| YearEvidence {
                    year: y,
                    per: mean(&per),
                    pbr: mean(&pbr),
                    eps: mean(&eps),
                    per_baseline: base(y, "per"),
                    pbr_baseline: base(y, "pbr"),
                    eps_baseline: base(y, "eps"),
                })
                .collect();
            let evidence = evidence(years);
            ScreenClassification {
                company_code: code,
                company_name: name,
                bucket: bucket_of(&evidence),
                evidence,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.bucket
            .cmp(&b.bucket)
            .then_with(|| {
                let key = |c: &ScreenClassification| c.evidence.mean_per.unwrap_or(f64::INFINITY);
                key(a).total_cmp(&key(b))
            })
            .then_with(|| a.company_code.cmp(&b.company_code))
    });
    Ok(out)
}

fn opt(v: Option<f64>, f: fn(f64) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn label(c: &ScreenClassification) -> String {
    format!("{} ({})", c.company_name, c.company_code)
}

fn evidence_table(cs: &[&ScreenClassification]) -> TableSlice {
    let columns = [
        "stock_code",
        "stock_abbrv",
        "mean per",
        "sector per",
        "sector per + std",
        "mean pbr",
        "sector pbr",
        "eps by year",
    ];
    TableSlice {
        columns: columns.map(String::from).to_vec(),
        rows: cs
            .iter()
            .map(|c| {
                let e = &c.evidence;
                let eps: Vec<String> = e
                    .years
                    .iter()
                    .map(|y| format!("{}: {}", y.year, opt(y.eps, currency)))
                    .collect();
                vec![
                    c.company_code.clone(),
                    c.company_name.clone(),
                    opt(e.mean_per, ratio),
                    opt(e.sector_per, ratio),
                    opt(e.sector_per_band, ratio),
                    opt(e.mean_pbr, ratio),
                    opt(e.sector_pbr, ratio),
                    eps.join("; "),
                ]
            })
            .collect(),
    }
}

pub fn summarize_screen(table: &ResultTable) -> Result<(Vec<Section>, Vec<ScreenClassification>), ComposeError> {
    let classes = classify_screen(table)?;
    let baselines = sector_stats(table)?;
    let mut sections = Vec::new();

    let mut rows = Vec::new();
    for ((year, metric), b) in &baselines {
        let f: fn(f64) -> String = if metric == "eps" { currency } else { ratio };
        rows.push(vec![
            year.to_string(),
            metric.clone(),
            f(b.mean),
            f(b.std),
            b.n.to_string(),
        ]);
    }
    sections.push(Section {
        heading: "Sector baselines".into(),
        narrative: vec![
            "Sector means and population standard deviations per year, over the rows the query returned.".into(),
        ],
        table: Some(TableSlice {
            columns: ["year", "metric", "mean", "std", "n"].map(String::from).to_vec(),
            rows,
        }),
    });

    for (bucket, heading) in [
        (Bucket::Undervalued, "Undervalued"),
        (Bucket::Growth, "Growth potential"),
        (Bucket::Neither, "Neither"),
    ] {
        let members: Vec<&ScreenClassification> = classes.iter().filter(|c| c.bucket == bucket).collect();
        let mut narrative = Vec::new();
        if members.is_empty() {
            narrative.push("No company meets this rule.".into());
        }
        for c in &members {
            let e = &c.evidence;
            narrative.push(match bucket {
                Bucket::Undervalued => format!(
                    "{}: mean PER {} is below the sector mean {}, mean PBR {} is below {}, and EPS is positive in every year.",
                    label(c),
                    opt(e.mean_per, ratio),
                    opt(e.sector_per, ratio),
                    opt(e.mean_pbr, ratio),
                    opt(e.sector_pbr, ratio)
                ),
                Bucket::Growth => format!(
                    "{}: EPS rises every year and mean PER {} is within the sector band of {}.",
                    label(c),
                    opt(e.mean_per, ratio),
                    opt(e.sector_per_band, ratio)
                ),
                Bucket::Neither => format!("{}: meets neither rule.", label(c)),
            });
        }
        sections.push(Section {
            heading: heading.into(),
            narrative,
            table: (!members.is_empty()).then(|| evidence_table(&members)),
        });
    }
    Ok((sections, classes))
}

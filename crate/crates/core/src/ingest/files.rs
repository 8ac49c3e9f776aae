//! Reading and writing the four input files.
//!
//! `companies.csv`, `prices.csv` and `indicators.csv` are UTF-8 CSV with a
//! header row; `statements.jsonl` holds one JSON object per line. Malformed
//! rows become [`Rejection`]s and never stop the load.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::records::*;
use super::{IngestError, Rejection};

pub const COMPANIES_FILE: &str = "companies.csv";
pub const PRICES_FILE: &str = "prices.csv";
pub const INDICATORS_FILE: &str = "indicators.csv";
pub const STATEMENTS_FILE: &str = "statements.jsonl";

const COMPANY_HEADER: [&str; 10] = [
    "stock_code",
    "stock_nm",
    "stock_abbrv",
    "stock_nm_eng",
    "listing_dt",
    "market_nm",
    "sector",
    "outstanding_shares",
    "kospi200_item_yn",
    "competitors",
];
const PRICE_HEADER: [&str; 6] = ["stock_code", "date", "open", "close", "high", "low"];
const INDICATOR_HEADER: [&str; 5] = ["stock_code", "date", "per", "pbr", "eps"];

/// Everything read from an input directory.
#[derive(Debug, Default, Clone)]
pub struct InputFiles {
    pub companies: Vec<Located<CompanyRecord>>,
    pub prices: Vec<Located<DailyPriceRecord>>,
    pub indicators: Vec<Located<IndicatorRecord>>,
    pub statements: Vec<Located<FinStatementRecord>>,
    pub rejected: Vec<Rejection>,
}

struct Row<'a> {
    columns: &'a HashMap<String, usize>,
    record: &'a csv::StringRecord,
}

impl Row<'_> {
    fn text(&self, name: &str) -> Result<String, String> {
        let i = self.columns.get(name).ok_or_else(|| format!("missing column {name}"))?;
        Ok(self.record.get(*i).unwrap_or("").trim().to_string())
    }

    fn float(&self, name: &str) -> Result<f64, String> {
        let t = self.text(name)?;
        t.parse().map_err(|_| format!("{name}: not a number: {t:?}"))
    }

    fn opt_float(&self, name: &str) -> Result<Option<f64>, String> {
        let t = self.text(name)?;
        if t.is_empty() {
            return Ok(None);
        }
        t.parse().map(Some).map_err(|_| format!("{name}: not a number: {t:?}"))
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> IngestError {
    IngestError::Io(format!("{}: {e}", path.display()))
}

fn read_csv<T>(
    path: &Path,
    parse: impl Fn(&Row) -> Result<T, String>,
    rejected: &mut Vec<Rejection>,
) -> Result<Vec<Located<T>>, IngestError> {
    let file_name = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let columns: HashMap<String, usize> = reader
        .headers()
        .map_err(|e| io_err(path, e))?
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_string(), i))
        .collect();
    let mut out = Vec::new();
    for result in reader.records() {
        match result {
            Ok(record) => {
                let line = record.position().map_or(0, |p| p.line() as usize);
                let row = Row {
                    columns: &columns,
                    record: &record,
                };
                match parse(&row) {
                    Ok(r) => out.push(Located {
                        file: file_name.clone(),
                        line,
                        record: r,
                    }),
                    Err(reason) => rejected.push(Rejection {
                        file: file_name.clone(),
                        line,
                        reason,
                    }),
                }
            }
            Err(e) => {
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(io_err(path, e));
                }
                let line = e.position().map_or(0, |p| p.line() as usize);
                rejected.push(Rejection {
                    file: file_name.clone(),
                    line,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_uppercase().as_str() {
        "Y" | "TRUE" | "1" => Ok(true),
        "N" | "FALSE" | "0" | "" => Ok(false),
        _ => Err(format!("kospi200_item_yn: not a flag: {s:?}")),
    }
}

fn parse_company(r: &Row) -> Result<CompanyRecord, String> {
    let shares = r.text("outstanding_shares")?;
    let competitors = r.text("competitors")?;
    Ok(CompanyRecord {
        stock_code: r.text("stock_code")?,
        stock_nm: r.text("stock_nm")?,
        stock_abbrv: r.text("stock_abbrv")?,
        stock_nm_eng: r.text("stock_nm_eng")?,
        listing_dt: r.text("listing_dt")?,
        market_nm: r.text("market_nm")?,
        sector: r.text("sector")?,
        outstanding_shares: shares
            .parse()
            .map_err(|_| format!("outstanding_shares: not an integer: {shares:?}"))?,
        kospi200_item_yn: parse_bool(&r.text("kospi200_item_yn")?)?,
        competitors: competitors
            .split(';')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(String::from)
            .collect(),
    })
}

fn parse_price(r: &Row) -> Result<DailyPriceRecord, String> {
    Ok(DailyPriceRecord {
        stock_code: r.text("stock_code")?,
        date: r.text("date")?,
        open: r.float("open")?,
        close: r.float("close")?,
        high: r.float("high")?,
        low: r.float("low")?,
    })
}

fn parse_indicator(r: &Row) -> Result<IndicatorRecord, String> {
    Ok(IndicatorRecord {
        stock_code: r.text("stock_code")?,
        date: r.text("date")?,
        per: r.opt_float("per")?,
        pbr: r.opt_float("pbr")?,
        eps: r.opt_float("eps")?,
    })
}

fn read_statements(
    path: &Path,
    rejected: &mut Vec<Rejection>,
) -> Result<Vec<Located<FinStatementRecord>>, IngestError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<FinStatementRecord>(&line) {
            Ok(record) => out.push(Located {
                file: STATEMENTS_FILE.into(),
                line: i + 1,
                record,
            }),
            Err(e) => rejected.push(Rejection {
                file: STATEMENTS_FILE.into(),
                line: i + 1,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

/// Reads the input directory. `companies.csv` is required; the other files
/// are optional.
pub fn read_dir(dir: &Path) -> Result<InputFiles, IngestError> {
    let mut input = InputFiles::default();
    let companies = dir.join(COMPANIES_FILE);
    if !companies.exists() {
        return Err(IngestError::Io(format!("{} not found", companies.display())));
    }
    input.companies = read_csv(&companies, parse_company, &mut input.rejected)?;
    let prices = dir.join(PRICES_FILE);
    if prices.exists() {
        input.prices = read_csv(&prices, parse_price, &mut input.rejected)?;
    }
    let indicators = dir.join(INDICATORS_FILE);
    if indicators.exists() {
        input.indicators = read_csv(&indicators, parse_indicator, &mut input.rejected)?;
    }
    let statements = dir.join(STATEMENTS_FILE);
    if statements.exists() {
        input.statements = read_statements(&statements, &mut input.rejected)?;
    }
    Ok(input)
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, IngestError> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| io_err(path, e))
}

/// Writes records in the documented formats. Output is a pure function of
/// the records.
pub fn write_dir(
    dir: &Path,
    companies: &[CompanyRecord],
    prices: &[DailyPriceRecord],
    indicators: &[IndicatorRecord],
    statements: &[FinStatementRecord],
) -> Result<(), IngestError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let path = dir.join(COMPANIES_FILE);
    let mut w = csv_writer(&path)?;
    let werr = |e: csv::Error| io_err(&path, e);
    w.write_record(COMPANY_HEADER).map_err(werr)?;
    for c in companies {
        w.write_record([
            c.stock_code.clone(),
            c.stock_nm.clone(),
            c.stock_abbrv.clone(),
            c.stock_nm_eng.clone(),
            c.listing_dt.clone(),
            c.market_nm.clone(),
            c.sector.clone(),
            c.outstanding_shares.to_string(),
            if c.kospi200_item_yn { "Y" } else { "N" }.to_string(),
            c.competitors.join(";"),
        ])
        .map_err(werr)?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;

    let path = dir.join(PRICES_FILE);
    let mut w = csv_writer(&path)?;
    let werr = |e: csv::Error| io_err(&path, e);
    w.write_record(PRICE_HEADER).map_err(werr)?;
    for p in prices {
        w.write_record([
            p.stock_code.clone(),
            p.date.clone(),
            p.open.to_string(),
            p.close.to_string(),
            p.high.to_string(),
            p.low.to_string(),
        ])
        .map_err(werr)?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;

    let path = dir.join(INDICATORS_FILE);
    let mut w = csv_writer(&path)?;
    let werr = |e: csv::Error| io_err(&path, e);
    w.write_record(INDICATOR_HEADER).map_err(werr)?;
    for i in indicators {
        w.write_record([i.stock_code.clone(), i.date.clone(), opt(i.per), opt(i.pbr), opt(i.eps)])
            .map_err(werr)?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;

    let path = dir.join(STATEMENTS_FILE);
    let mut f = File::create(&path).map_err(|e| io_err(&path, e))?;
    for s in statements {
        let line = serde_json::to_string(s).expect("statement serializes");
        writeln!(f, "{line}").map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

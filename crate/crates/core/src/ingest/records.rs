use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// One row of `companies.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyRecord {
    pub stock_code: String,
    pub stock_nm: String,
    pub stock_abbrv: String,
    pub stock_nm_eng: String,
    pub listing_dt: String,
    pub market_nm: String,
    pub sector: String,
    pub outstanding_shares: i64,
    pub kospi200_item_yn: bool,
    pub competitors: Vec<String>,
}

/// One row of `prices.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyPriceRecord {
    pub stock_code: String,
    pub date: String,
    pub open: f64,
    pub close: f64,
    pub high: f64,
    pub low: f64,
}

/// One row of `indicators.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRecord {
    pub stock_code: String,
    pub date: String,
    pub per: Option<f64>,
    pub pbr: Option<f64>,
    pub eps: Option<f64>,
}

/// One line of `statements.jsonl`. A missing quarter means an annual
/// statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinStatementRecord {
    pub stock_code: String,
    pub year: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quarter: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revenue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_income: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net_income: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_assets: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_liabilities: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_equity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capital_stock: Option<f64>,
}

impl FinStatementRecord {
    pub fn annual(stock_code: &str, year: i64) -> Self {
        FinStatementRecord {
            stock_code: stock_code.to_string(),
            year,
            quarter: None,
            revenue: None,
            operating_income: None,
            net_income: None,
            total_assets: None,
            total_liabilities: None,
            total_equity: None,
            capital_stock: None,
        }
    }

    pub fn metrics(&self) -> [(&'static str, Option<f64>); 7] {
        [
            ("revenue", self.revenue),
            ("operating_income", self.operating_income),
            ("net_income", self.net_income),
            ("total_assets", self.total_assets),
            ("total_liabilities", self.total_liabilities),
            ("total_equity", self.total_equity),
            ("capital_stock", self.capital_stock),
        ]
    }
}

/// A record plus where it came from, for rejection reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Located<T> {
    pub file: String,
    pub line: usize,
    pub record: T,
}

impl<T> Located<T> {
    /// Wraps in-memory records, numbering lines from 1.
    pub fn inline(file: &str, records: impl IntoIterator<Item = T>) -> Vec<Located<T>> {
        records
            .into_iter()
            .enumerate()
            .map(|(i, record)| Located {
                file: file.to_string(),
                line: i + 1,
                record,
            })
            .collect()
    }
}

pub fn is_stock_code(s: &str) -> bool {
    s.len() == 6 && s.bytes().all(|b| b.is_ascii_digit() || b.is_ascii_uppercase())
}

/// Parses `YYYYMMDD` into a calendar date.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    NaiveDate::parse_from_str(s, "%Y%m%d").ok()
}

fn check_code(code: &str) -> Result<(), String> {
    if is_stock_code(code) {
        Ok(())
    } else {
        Err(format!("invalid stock_code {code:?}"))
    }
}

impl CompanyRecord {
    pub fn check(&self) -> Result<(), String> {
        check_code(&self.stock_code)?;
        if parse_date(&self.listing_dt).is_none() {
            return Err(format!("invalid listing_dt {:?}", self.listing_dt));
        }
        if self.sector.trim().is_empty() {
            return Err("empty sector".into());
        }
        if self.outstanding_shares < 0 {
            return Err("negative outstanding_shares".into());
        }
        Ok(())
    }
}

impl DailyPriceRecord {
    pub fn check(&self) -> Result<(), String> {
        check_code(&self.stock_code)?;
        let all = [self.open, self.close, self.high, self.low];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err("prices must be finite and non-negative".into());
        }
        if self.low > self.open.min(self.close) || self.high < self.open.max(self.close) {
            return Err("low/high do not bound open and close".into());
        }
        Ok(())
    }
}

impl IndicatorRecord {
    pub fn check(&self) -> Result<(), String> {
        check_code(&self.stock_code)?;
        for v in [self.per, self.pbr, self.eps].into_iter().flatten() {
            if !v.is_finite() {
                return Err("indicator values must be finite".into());
            }
        }
        Ok(())
    }
}

impl FinStatementRecord {
    pub fn check(&self) -> Result<(), String> {
        check_code(&self.stock_code)?;
        if !(1900..=2999).contains(&self.year) {
            return Err(format!("year {} out of range", self.year));
        }
        if let Some(q) = self.quarter {
            if !(1..=4).contains(&q) {
                return Err(format!("quarter {q} out of range"));
            }
        }
        if self.metrics().iter().any(|(_, v)| v.is_some_and(|v| !v.is_finite())) {
            return Err("statement values must be finite".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stock_codes() {
        assert!(is_stock_code("005930"));
        assert!(is_stock_code("A1B2C3"));
        assert!(!is_stock_code("5930"));
        assert!(!is_stock_code("00593a"));
    }

    #[test]
    fn dates() {
        assert_eq!(parse_date("20230306"), NaiveDate::from_ymd_opt(2023, 3, 6));
        assert_eq!(parse_date("20231301"), None);
        assert_eq!(parse_date("2023036"), None);
        assert!(parse_date("20240229").is_some());
        assert_eq!(parse_date("20230229"), None);
    }

    #[test]
    fn price_bounds() {
        let mut p = DailyPriceRecord {
            stock_code: "005930".into(),
            date: "20230306".into(),
            open: 100.0,
            close: 110.0,
            high: 112.0,
            low: 99.0,
        };
        assert!(p.check().is_ok());
        p.high = 105.0;
        assert!(p.check().is_err());
    }
}

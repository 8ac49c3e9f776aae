//! Deterministic synthetic market data.
//!
//! Every number is generated from the spec and a seed; the values are
//! invented and carry no relation to real filings. Each company draws from
//! its own ChaCha stream (selected by its position in the spec), so output is
//! byte-identical for identical `(spec, seed)`.

use std::collections::BTreeSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::files::{self, InputFiles};
use super::records::*;
use super::IngestError;

/// Shape of a company's generated indicator series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Low PER and PBR, positive EPS.
    Value,
    /// Moderate PER and PBR, rising positive EPS.
    Growth,
    /// High PER and PBR, falling EPS.
    Neutral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanySpec {
    pub code: String,
    pub name: String,
    pub abbrv: String,
    pub name_eng: String,
    pub market: String,
    pub listing_dt: String,
    pub kospi200: bool,
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub name: String,
    pub companies: Vec<CompanySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub sectors: Vec<SectorSpec>,
    /// Listed on the first company's record; ingestion wires both directions.
    #[serde(default)]
    pub competitor_pairs: Vec<(String, String)>,
    /// Codes added to competitor lists that match no company.
    #[serde(default)]
    pub dangling_competitors: Vec<(String, String)>,
    pub first_year: i64,
    pub last_year: i64,
    /// `MMDD` trading days sampled in every year.
    #[serde(default)]
    pub price_days: Vec<String>,
    /// `MMDD` of the yearly indicator snapshot.
    pub indicator_day: String,
    /// Also emit four quarterly statements per year.
    #[serde(default)]
    pub quarterly_statements: bool,
    /// Statements that replace generated ones with the same key.
    #[serde(default)]
    pub pinned_statements: Vec<FinStatementRecord>,
}

/// Generated records, ready to write or ingest.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureData {
    pub companies: Vec<CompanyRecord>,
    pub prices: Vec<DailyPriceRecord>,
    pub indicators: Vec<IndicatorRecord>,
    pub statements: Vec<FinStatementRecord>,
}

// header row occupies line 1 of each CSV
fn after_header<T>(mut v: Vec<Located<T>>) -> Vec<Located<T>> {
    for l in &mut v {
        l.line += 1;
    }
    v
}

impl FixtureData {
    pub fn write_dir(&self, dir: &Path) -> Result<(), IngestError> {
        files::write_dir(dir, &self.companies, &self.prices, &self.indicators, &self.statements)
    }

    /// The records as if read from files, with 1-based data-line numbers.
    pub fn to_input(&self) -> InputFiles {
        InputFiles {
            companies: after_header(Located::inline(files::COMPANIES_FILE, self.companies.clone())),
            prices: after_header(Located::inline(files::PRICES_FILE, self.prices.clone())),
            indicators: after_header(Located::inline(files::INDICATORS_FILE, self.indicators.clone())),
            statements: Located::inline(files::STATEMENTS_FILE, self.statements.clone()),
            rejected: Vec::new(),
        }
    }
}

/// Demo sector and company list: `(code, name, abbrv, profile, kospi200)`.
const DEMO_COMPANIES: [(&str, &str, &str, Profile, bool); 12] = [
    ("005930", "Samsung Electronics", "Samsung", Profile::Neutral, true),
    ("000660", "SK Hynix", "SK Hynix", Profile::Growth, true),
    ("038060", "Lumens", "Lumens", Profile::Value, false),
    ("153490", "Woori E&L", "Woori E&L", Profile::Value, false),
    ("108320", "LX Semicon", "LX Semicon", Profile::Value, true),
    ("080520", "O-DITEC", "O-DITEC", Profile::Value, false),
    ("036170", "HM Nex", "HM Nex", Profile::Value, false),
    ("078350", "Hanyang Digitech", "Hanyang Digitech", Profile::Growth, false),
    ("000990", "DB HiTek", "DB HiTek", Profile::Growth, true),
    ("149010", "IK Semicon", "IK Semicon", Profile::Growth, false),
    ("077360", "Duksan HiMetal", "Duksan HiMetal", Profile::Growth, false),
    ("020760", "Iljin Display", "Iljin Display", Profile::Growth, false),
];

pub const TRILLION: f64 = 1.0e12;

fn pinned(code: &str, year: i64, revenue: f64, op: f64, net: f64) -> FinStatementRecord {
    let mut s = FinStatementRecord::annual(code, year);
    s.revenue = Some(revenue * TRILLION);
    s.operating_income = Some(op * TRILLION);
    s.net_income = Some(net * TRILLION);
    s
}

impl FixtureSpec {
    /// The canonical demo: one "Semiconductor" sector of twelve companies,
    /// 2023 to 2025.
    pub fn demo() -> Self {
        let companies = DEMO_COMPANIES
            .iter()
            .enumerate()
            .map(|(i, (code, name, abbrv, profile, kospi))| CompanySpec {
                code: code.to_string(),
                name: name.to_string(),
                abbrv: abbrv.to_string(),
                name_eng: name.to_string(),
                market: if *kospi { "KOSPI" } else { "KOSDAQ" }.to_string(),
                listing_dt: format!("{}0{}15", 1975 + 3 * i as i64, 1 + i % 9),
                kospi200: *kospi,
                profile: *profile,
            })
            .collect();
        // Pinned so the comparison case has a clear story: the first company
        // keeps the revenue lead while the second overtakes it on profit.
        let pinned_statements = vec![
            pinned("005930", 2023, 260.0, 7.0, 15.0),
            pinned("005930", 2024, 310.0, 33.0, 34.0),
            pinned("005930", 2025, 300.0, 28.0, 30.0),
            pinned("000660", 2023, 33.0, -8.0, -9.0),
            pinned("000660", 2024, 66.0, 23.0, 20.0),
            pinned("000660", 2025, 88.0, 40.0, 33.0),
        ];
        FixtureSpec {
            sectors: vec![SectorSpec {
                name: "Semiconductor".into(),
                companies,
            }],
            competitor_pairs: vec![
                ("005930".into(), "000660".into()),
                ("000990".into(), "108320".into()),
                ("149010".into(), "077360".into()),
            ],
            dangling_competitors: Vec::new(),
            first_year: 2023,
            last_year: 2025,
            price_days: vec!["0306".into(), "0904".into()],
            indicator_day: "1228".into(),
            quarterly_statements: false,
            pinned_statements,
        }
    }

    /// `companies` companies spread round-robin over `sectors` sectors, with
    /// neighbouring companies in a sector listed as competitors.
    pub fn synthetic(companies: usize, sectors: usize, first_year: i64, last_year: i64) -> Self {
        let sectors = sectors.max(1);
        let mut out: Vec<SectorSpec> = (0..sectors)
            .map(|s| SectorSpec {
                name: format!("Sector {:02}", s + 1),
                companies: Vec::new(),
            })
            .collect();
        let profiles = [Profile::Value, Profile::Growth, Profile::Neutral];
        for i in 0..companies {
            let code = format!("{:06}", 100000 + i);
            out[i % sectors].companies.push(CompanySpec {
                name: format!("Synthetic Company {:04}", i + 1),
                abbrv: format!("SC{:04}", i + 1),
                name_eng: format!("Synthetic Company {:04}", i + 1),
                market: if i % 3 == 0 { "KOSPI" } else { "KOSDAQ" }.into(),
                listing_dt: format!("{}{:02}{:02}", 1980 + (i % 40), 1 + i % 12, 1 + i % 28),
                kospi200: i % 14 == 0,
                profile: profiles[i % 3],
                code,
            });
        }
        let mut pairs = Vec::new();
        for s in &out {
            for w in s.companies.windows(2) {
                pairs.push((w[0].code.clone(), w[1].code.clone()));
            }
        }
        FixtureSpec {
            sectors: out,
            competitor_pairs: pairs,
            dangling_competitors: Vec::new(),
            first_year,
            last_year,
            price_days: Vec::new(),
            indicator_day: "1228".into(),
            quarterly_statements: false,
            pinned_statements: Vec::new(),
        }
    }

    /// A randomized small spec for property tests.
    pub fn randomized(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=14);
        let sectors = rng.random_range(1..=4);
        let first = rng.random_range(2019..=2024);
        let last = first + rng.random_range(0..=2);
        let mut spec = FixtureSpec::synthetic(n, sectors, first, last);
        let profiles = [Profile::Value, Profile::Growth, Profile::Neutral];
        for s in &mut spec.sectors {
            for c in &mut s.companies {
                c.profile = profiles[rng.random_range(0..3)];
            }
        }
        let codes: Vec<String> = spec.companies().map(|c| c.code.clone()).collect();
        spec.competitor_pairs.clear();
        for _ in 0..rng.random_range(0..=n) {
            let a = &codes[rng.random_range(0..n)];
            let b = &codes[rng.random_range(0..n)];
            if a != b {
                spec.competitor_pairs.push((a.clone(), b.clone()));
            }
        }
        if rng.random_bool(0.5) {
            spec.dangling_competitors.push((codes[0].clone(), "Z99999".into()));
        }
        let all_days = ["0102", "0306", "0415", "0630", "0904", "1010", "1228"];
        spec.price_days = all_days
            .iter()
            .filter(|_| rng.random_bool(0.4))
            .map(|d| d.to_string())
            .collect();
        spec.indicator_day = all_days[rng.random_range(0..all_days.len())].into();
        spec.quarterly_statements = rng.random_bool(0.5);
        spec
    }

    pub fn companies(&self) -> impl Iterator<Item = &CompanySpec> {
        self.sectors.iter().flat_map(|s| s.companies.iter())
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i64> {
        self.first_year..=self.last_year
    }

    pub fn check(&self) -> Result<(), IngestError> {
        let bad = |m: String| Err(IngestError::BadSpec(m));
        if self.first_year > self.last_year || !(1900..=2999).contains(&self.first_year) || self.last_year > 2999 {
            return bad(format!("year range {}..{}", self.first_year, self.last_year));
        }
        let mut codes = BTreeSet::new();
        for c in self.companies() {
            if !is_stock_code(&c.code) {
                return bad(format!("stock code {:?}", c.code));
            }
            if !codes.insert(c.code.as_str()) {
                return bad(format!("duplicate stock code {}", c.code));
            }
        }
        for (a, b) in &self.competitor_pairs {
            if !codes.contains(a.as_str()) || !codes.contains(b.as_str()) {
                return bad(format!("competitor pair {a}-{b} names an unknown company"));
            }
        }
        for (a, _) in &self.dangling_competitors {
            if !codes.contains(a.as_str()) {
                return bad(format!("dangling competitor on unknown company {a}"));
            }
        }
        for day in self.price_days.iter().chain([&self.indicator_day]) {
            if parse_date(&format!("{}{day}", self.first_year)).is_none() {
                return bad(format!("day {day:?} is not MMDD"));
            }
        }
        Ok(())
    }

    /// Generates records. Identical `(self, seed)` gives identical output.
    pub fn generate(&self, seed: u64) -> Result<FixtureData, IngestError> {
        self.check()?;
        let mut data = FixtureData {
            companies: Vec::new(),
            prices: Vec::new(),
            indicators: Vec::new(),
            statements: Vec::new(),
        };
        for (index, (sector, c)) in self
            .sectors
            .iter()
            .flat_map(|s| s.companies.iter().map(move |c| (s, c)))
            .enumerate()
        {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let mut competitors: Vec<String> = self
                .competitor_pairs
                .iter()
                .filter(|(a, _)| *a == c.code)
                .map(|(_, b)| b.clone())
                .collect();
            competitors.extend(
                self.dangling_competitors
                    .iter()
                    .filter(|(a, _)| *a == c.code)
                    .map(|(_, b)| b.clone()),
            );
            data.companies.push(CompanyRecord {
                stock_code: c.code.clone(),
                stock_nm: c.name.clone(),
                stock_abbrv: c.abbrv.clone(),
                stock_nm_eng: c.name_eng.clone(),
                listing_dt: c.listing_dt.clone(),
                market_nm: c.market.clone(),
                sector: sector.name.clone(),
                outstanding_shares: rng.random_range(1_000_000..6_000_000_000),
                kospi200_item_yn: c.kospi200,
                competitors,
            });
            self.generate_series(c, &mut rng, &mut data);
        }
        for p in &self.pinned_statements {
            let key = |s: &FinStatementRecord| (s.stock_code.clone(), s.year, s.quarter);
            match data.statements.iter_mut().find(|s| key(s) == key(p)) {
                Some(slot) => *slot = p.clone(),
                None => data.statements.push(p.clone()),
            }
        }
        Ok(data)
    }

    fn generate_series(&self, c: &CompanySpec, rng: &mut ChaCha8Rng, data: &mut FixtureData) {
        let mut price: f64 = rng.random_range(2_000.0..90_000.0_f64).round();
        for year in self.years() {
            for day in &self.price_days {
                let open = price;
                let close = (open * rng.random_range(0.9..1.1)).round();
                let high = (open.max(close) * rng.random_range(1.0..1.04)).round();
                let low = (open.min(close) * rng.random_range(0.96..1.0)).round();
                data.prices.push(DailyPriceRecord {
                    stock_code: c.code.clone(),
                    date: format!("{year}{day}"),
                    open,
                    close,
                    high,
                    low,
                });
                price = close;
            }
        }

        let two = |v: f64| (v * 100.0).round() / 100.0;
        let mut eps: f64 = match c.profile {
            Profile::Value => rng.random_range(500.0..3_000.0),
            Profile::Growth => rng.random_range(200.0..800.0),
            Profile::Neutral => rng.random_range(2_000.0..5_000.0),
        };
        for year in self.years() {
            let (per, pbr) = match c.profile {
                Profile::Value => (rng.random_range(4.0..7.0), rng.random_range(0.4..0.9)),
                Profile::Growth => (rng.random_range(12.0..17.0), rng.random_range(1.3..2.2)),
                Profile::Neutral => (rng.random_range(26.0..32.0), rng.random_range(2.5..3.5)),
            };
            data.indicators.push(IndicatorRecord {
                stock_code: c.code.clone(),
                date: format!("{year}{}", self.indicator_day),
                per: Some(two(per)),
                pbr: Some(two(pbr)),
                eps: Some(eps.round()),
            });
            eps *= match c.profile {
                Profile::Value => rng.random_range(0.9..1.1),
                Profile::Growth => rng.random_range(1.1..1.5),
                Profile::Neutral => rng.random_range(0.7..0.95),
            };
        }

        let mut revenue: f64 = rng.random_range(50.0..2_000.0) * 1.0e9;
        for year in self.years() {
            let margin: f64 = rng.random_range(-0.05..0.2);
            let annual = |scale: f64, rng: &mut ChaCha8Rng, quarter: Option<i64>| {
                let rev = (revenue * scale / 1.0e6).round() * 1.0e6;
                let op = (rev * margin / 1.0e6).round() * 1.0e6;
                let net = (op * rng.random_range(0.6..0.9) / 1.0e6).round() * 1.0e6;
                let assets = (rev * rng.random_range(1.0..2.5) / 1.0e6).round() * 1.0e6;
                let liabilities = (assets * rng.random_range(0.2..0.6) / 1.0e6).round() * 1.0e6;
                FinStatementRecord {
                    stock_code: c.code.clone(),
                    year,
                    quarter,
                    revenue: Some(rev),
                    operating_income: Some(op),
                    net_income: Some(net),
                    total_assets: Some(assets),
                    total_liabilities: Some(liabilities),
                    total_equity: Some(assets - liabilities),
                    capital_stock: Some((assets * 0.05 / 1.0e6).round() * 1.0e6),
                }
            };
            let a = annual(1.0, rng, None);
            data.statements.push(a);
            if self.quarterly_statements {
                for q in 1..=4 {
                    let s = annual(0.25, rng, Some(q));
                    data.statements.push(s);
                }
            }
            revenue *= rng.random_range(0.85..1.3);
        }
    }
}

/// Resolves a spec name: `demo`, `synthetic:<companies>`, or a path to a
/// JSON [`FixtureSpec`].
pub fn resolve_spec(name: &str) -> Result<FixtureSpec, IngestError> {
    if name == "demo" {
        return Ok(FixtureSpec::demo());
    }
    if let Some(n) = name.strip_prefix("synthetic:") {
        let n: usize = n
            .parse()
            .map_err(|_| IngestError::BadSpec(format!("bad company count in {name:?}")))?;
        let sectors = (n / 40).clamp(1, 60);
        return Ok(FixtureSpec::synthetic(n, sectors, 2023, 2025));
    }
    let text = std::fs::read_to_string(name).map_err(|e| IngestError::BadSpec(format!("{name}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| IngestError::BadSpec(format!("{name}: {e}")))
}

//! Helpers shared by the binary and HTTP tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

#[path = "../../../core/tests/support/stub.rs"]
pub mod stub;

pub const CASE_STUDY_1: &str = r#"MATCH (c1:Company {stock_code: "005930"})-[:HAS_FINANCIAL_STATEMENTS]
->(fs1:FinancialStatements)-[:FOR_YEAR]->(y:Year)
MATCH (c2:Company {stock_code: "000660"})-[:HAS_FINANCIAL_STATEMENTS]
->(fs2:FinancialStatements)-[:FOR_YEAR]->(y)
WHERE y.year IN [2023, 2024, 2025]
RETURN
  y.year AS year,
  c1.stock_abbrv AS samsung_stock_abbrv,
  fs1.revenue AS samsung_revenue,
  fs1.operating_income AS samsung_operating_income,
  fs1.net_income AS samsung_net_income,
  c2.stock_abbrv AS skhynix_stock_abbrv,
  fs2.revenue AS skhynix_revenue,
  fs2.operating_income AS skhynix_operating_income,
  fs2.net_income AS skhynix_net_income
ORDER BY y.year ASC"#;

pub const CASE_STUDY_1_QUESTION: &str = "Analyze the performance trends by comparing the revenue, operating income, and net income of Samsung Electronics (stock code: 005930) with its competitor SK Hynix (stock code: 000660) for the years 2023, 2024, and 2025.";

pub const CASE_STUDY_2_QUESTION: &str = "Within the same industry as SK Hynix, identify companies with high growth potential or undervalued stocks based on PER, PBR, and EPS for the years 2023, 2024, and 2025.";

/// Demo fixture node and edge totals.
pub const DEMO_NODES: usize = 178;
pub const DEMO_EDGES: usize = 324;

/// A working directory holding the demo fixture files and its snapshot.
pub struct Workspace {
    pub dir: tempfile::TempDir,
}

impl Workspace {
    pub fn demo() -> Self {
        let ws = Workspace {
            dir: tempfile::tempdir().unwrap(),
        };
        let out = ws.run(&["fixture", "demo", "42"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let out = ws.run(&["ingest"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        ws
    }

    pub fn path(&self) -> &Path {
        self.dir.path()
    }

    pub fn snapshot(&self) -> PathBuf {
        self.path().join("data/market.skg")
    }

    /// Runs the binary in the workspace with a clean `STOCKGRAPH_*` environment.
    pub fn command(&self, args: &[&str]) -> Command {
        let mut c = Command::new(env!("CARGO_BIN_EXE_stockgraph"));
        c.current_dir(self.path()).args(args);
        for (k, _) in std::env::vars() {
            if k.starts_with("STOCKGRAPH_") {
                c.env_remove(k);
            }
        }
        c
    }

    pub fn run(&self, args: &[&str]) -> Output {
        self.command(args).output().unwrap()
    }
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

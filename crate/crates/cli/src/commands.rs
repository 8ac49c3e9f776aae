//! Command-line surface.

use std::io::{BufRead, IsTerminal, Read, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::Value as Json;
use stockgraph::graph::{self, structural_hash, PropertyGraph};
use stockgraph::ingest::fixture::resolve_spec;
use stockgraph::ingest::{ingest_dir, IngestReport};
use stockgraph::schema::SchemaCatalog;

use crate::app::{load_snapshot, App, AppError};
use crate::config::{AppConfig, OutputFormat};

#[derive(Debug, Parser)]
#[command(
    name = "stockgraph",
    version,
    about = "Stock-market knowledge graph: ingest, query and ask"
)]
pub struct Cli {
    /// Config file (default: $STOCKGRAPH_CONFIG, then ./stockgraph.toml).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Snapshot file, overriding the config.
    #[arg(long, global = true)]
    pub snapshot: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub log_level: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load the input files in DIR (default: the configured data_dir) and write the snapshot.
    Ingest {
        dir: Option<PathBuf>,
        /// Add to the existing snapshot instead of starting empty.
        #[arg(long)]
        append: bool,
    },
    /// Run a query against the snapshot; `-` reads it from stdin.
    Query { cypher: String },
    /// Answer a question.
    Ask {
        question: String,
        /// Query generator to use (`template` or `external`).
        #[arg(long)]
        generator: Option<String>,
    },
    /// Write synthetic input files. SPEC is `demo`, `synthetic:<companies>` or a JSON spec file.
    Fixture {
        spec: String,
        seed: u64,
        /// Target directory (default: the configured data_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the graph schema.
    Schema,
    /// Node and edge counts per label and relationship type.
    Stats,
    /// Interactive loop: `:q <query>` runs a query, anything else is a question.
    Repl,
    /// Serve the HTTP API over the snapshot.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

impl Cli {
    /// Command-line flags win over the environment, which wins over the file.
    pub fn resolve_config(&self) -> Result<AppConfig, AppError> {
        let mut cfg = AppConfig::load(self.config.as_deref(), |k| std::env::var(k).ok()).map_err(AppError::system)?;
        if let Some(p) = &self.snapshot {
            cfg.snapshot_path = p.clone();
        }
        if let Some(o) = self.output {
            cfg.output = o;
        }
        if let Some(l) = &self.log_level {
            cfg.log_level = l.clone();
        }
        cfg.validate().map_err(AppError::system)?;
        Ok(cfg)
    }
}

fn write_json(out: &mut dyn Write, v: &Json) -> Result<(), AppError> {
    let text = serde_json::to_string_pretty(v).map_err(AppError::system)?;
    writeln!(out, "{text}").map_err(AppError::system)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), AppError> {
    out.write_all(text.as_bytes()).map_err(AppError::system)
}

fn counts_text(title: &str, counts: &std::collections::BTreeMap<String, usize>) -> String {
    let width = counts.keys().map(String::len).max().unwrap_or(0);
    let mut s = format!("{title}\n");
    for (k, v) in counts {
        s += &format!("  {k:<width$}  {v}\n");
    }
    s
}

fn report_text(r: &IngestReport) -> String {
    let mut s = counts_text("nodes created:", &r.loaded.nodes);
    s += &counts_text("edges created:", &r.loaded.edges);
    s += &format!("rejected records: {}\n", r.rejected.len());
    for rej in &r.rejected {
        s += &format!("  {}:{}: {}\n", rej.file, rej.line, rej.reason);
    }
    s += &format!("unresolved competitors: {}\n", r.unresolved_competitors.len());
    for u in &r.unresolved_competitors {
        s += &format!("  {} -> {}\n", u.stock_code, u.competitor);
    }
    s
}

fn stats_text(g: &PropertyGraph) -> String {
    let st = g.stats();
    let mut s = format!("nodes: {}\nedges: {}\n", st.nodes, st.edges);
    s += &counts_text("labels:", &st.labels);
    s += &counts_text("relationship types:", &st.rel_types);
    s
}

fn ingest(cfg: &AppConfig, dir: Option<PathBuf>, append: bool, out: &mut dyn Write) -> Result<(), AppError> {
    let dir = dir.unwrap_or_else(|| cfg.data_dir.clone());
    let mut g = if append && cfg.snapshot_path.exists() {
        load_snapshot(&cfg.snapshot_path)?
    } else {
        PropertyGraph::new()
    };
    let report = ingest_dir(&mut g, &SchemaCatalog::market(), &dir).map_err(AppError::system)?;
    if let Some(parent) = cfg.snapshot_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(AppError::system)?;
    }
    graph::persist(&g, &cfg.snapshot_path).map_err(AppError::system)?;
    if !report.rejected.is_empty() {
        tracing::warn!("{} records rejected", report.rejected.len());
    }
    match cfg.output {
        OutputFormat::Json => write_json(
            out,
            &serde_json::json!({
                "report": report,
                "snapshot": cfg.snapshot_path,
                "nodes": g.node_count(),
                "edges": g.edge_count(),
                "structural_hash": structural_hash(&g),
            }),
        ),
        OutputFormat::Table => emit(
            out,
            &format!(
                "{}snapshot: {} ({} nodes, {} edges)\n",
                report_text(&report),
                cfg.snapshot_path.display(),
                g.node_count(),
                g.edge_count()
            ),
        ),
    }
}

fn fixture(cfg: &AppConfig, spec: &str, seed: u64, dir: Option<PathBuf>, out: &mut dyn Write) -> Result<(), AppError> {
    let dir = dir.unwrap_or_else(|| cfg.data_dir.clone());
    let spec = resolve_spec(spec).map_err(|e| AppError::User {
        message: e.to_string(),
        position: None,
    })?;
    let data = spec.generate(seed).map_err(|e| AppError::User {
        message: e.to_string(),
        position: None,
    })?;
    std::fs::create_dir_all(&dir).map_err(AppError::system)?;
    data.write_dir(&dir).map_err(AppError::system)?;
    let counts = serde_json::json!({
        "dir": dir,
        "companies": data.companies.len(),
        "prices": data.prices.len(),
        "indicators": data.indicators.len(),
        "statements": data.statements.len(),
    });
    match cfg.output {
        OutputFormat::Json => write_json(out, &counts),
        OutputFormat::Table => emit(
            out,
            &format!(
                "wrote {} companies, {} prices, {} indicators, {} statements to {}\n",
                data.companies.len(),
                data.prices.len(),
                data.indicators.len(),
                data.statements.len(),
                dir.display()
            ),
        ),
    }
}

fn run_query(app: &App, format: OutputFormat, text: &str, out: &mut dyn Write) -> Result<(), AppError> {
    let table = app.query(text)?;
    match format {
        OutputFormat::Json => write_json(out, &table.to_json()),
        OutputFormat::Table => emit(out, &table.to_text()),
    }
}

fn run_ask(
    app: &App,
    format: OutputFormat,
    question: &str,
    generator: Option<&str>,
    out: &mut dyn Write,
) -> Result<(), AppError> {
    let answer = app.ask(question, generator)?;
    match format {
        OutputFormat::Json => write_json(out, &answer.report.to_json()),
        OutputFormat::Table => emit(out, &answer.report.to_text()),
    }
}

const REPL_HELP: &str = "\
:q <query>   run a query
:schema      print the schema
:stats       print graph counts
:help        this text
:exit        leave (also end of input)
anything else is asked as a question
";

/// Reads lines until end of input or `:exit`. Errors are reported on `err`
/// and the loop continues.
pub fn repl(
    app: &App,
    format: OutputFormat,
    input: impl BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), AppError> {
    let prompt = std::io::stdin().is_terminal();
    let show_prompt = |out: &mut dyn Write| -> Result<(), AppError> {
        if prompt {
            write!(out, "stockgraph> ").map_err(AppError::system)?;
            out.flush().map_err(AppError::system)?;
        }
        Ok(())
    };
    show_prompt(out)?;
    for line in input.lines() {
        let line = line.map_err(AppError::system)?;
        let line = line.trim();
        let result = match line {
            "" => Ok(()),
            ":exit" | ":quit" => break,
            ":help" => emit(out, REPL_HELP),
            ":schema" => emit(out, &app.engine().catalog().schema_text()),
            ":stats" => emit(out, &stats_text(app.graph())),
            _ => match line.strip_prefix(":q") {
                Some(rest) if rest.is_empty() || rest.starts_with(char::is_whitespace) => {
                    run_query(app, format, rest.trim(), out)
                }
                _ if line.starts_with(':') => Err(AppError::User {
                    message: format!("unknown command {line}; try :help"),
                    position: None,
                }),
                _ => run_ask(app, format, line, None, out),
            },
        };
        if let Err(e) = result {
            writeln!(err, "error: {e}").map_err(AppError::system)?;
        }
        show_prompt(out)?;
    }
    Ok(())
}

/// Runs one command with a resolved configuration.
pub fn run(cfg: &AppConfig, command: Command, out: &mut dyn Write) -> Result<(), AppError> {
    match command {
        Command::Ingest { dir, append } => ingest(cfg, dir, append, out),
        Command::Fixture { spec, seed, out: dir } => fixture(cfg, &spec, seed, dir, out),
        Command::Schema => {
            let catalog = SchemaCatalog::market();
            match cfg.output {
                OutputFormat::Json => write_json(out, &catalog.to_json()),
                OutputFormat::Table => emit(out, &catalog.schema_text()),
            }
        }
        Command::Query { cypher } => {
            let text = if cypher == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map_err(AppError::system)?;
                s
            } else {
                cypher
            };
            run_query(&App::open(cfg)?, cfg.output, &text, out)
        }
        Command::Ask { question, generator } => {
            run_ask(&App::open(cfg)?, cfg.output, &question, generator.as_deref(), out)
        }
        Command::Stats => {
            let app = App::open(cfg)?;
            match cfg.output {
                OutputFormat::Json => write_json(out, &app.stats_json()),
                OutputFormat::Table => emit(out, &stats_text(app.graph())),
            }
        }
        Command::Repl => {
            let app = App::open(cfg)?;
            let stdin = std::io::stdin();
            repl(&app, cfg.output, stdin.lock(), out, &mut std::io::stderr())
        }
        Command::Serve { addr } => {
            let app = Arc::new(App::open(cfg)?);
            let runtime = tokio::runtime::Runtime::new().map_err(AppError::system)?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(addr).await.map_err(AppError::system)?;
                let local = listener.local_addr().map_err(AppError::system)?;
                eprintln!("stockgraph: serving {} on http://{local}", cfg.snapshot_path.display());
                crate::http::serve(app, listener).await.map_err(AppError::system)
            })
        }
    }
}

//! Application configuration: a TOML file with `STOCKGRAPH_*` environment
//! overrides.
//!
//! ```toml
//! data_dir = "data"
//! snapshot_path = "data/market.skg"
//! output = "table"          # or "json"
//! log_level = "warn"
//!
//! [backend]
//! type = "external"         # or "none"
//! url = "http://127.0.0.1:9000/generate"
//! timeout_s = 30
//! fallback = true           # use templates when the backend fails
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stockgraph::translate::external::DEFAULT_TIMEOUT_S;
use thiserror::Error;

pub const CONFIG_ENV: &str = "STOCKGRAPH_CONFIG";
pub const DEFAULT_CONFIG_FILE: &str = "stockgraph.toml";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("bad config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("bad value for {key}: {message}")]
    Env { key: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Backend {
    #[default]
    None,
    External {
        url: String,
        #[serde(default = "default_timeout")]
        timeout_s: u64,
        /// Use the built-in templates when the backend is unreachable or
        /// times out.
        #[serde(default = "default_fallback")]
        fallback: bool,
    },
}

fn default_fallback() -> bool {
    true
}

fn default_timeout() -> u64 {
    DEFAULT_TIMEOUT_S
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub data_dir: PathBuf,
    pub snapshot_path: PathBuf,
    pub backend: Backend,
    pub output: OutputFormat,
    pub log_level: String,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            data_dir: PathBuf::from("data"),
            snapshot_path: PathBuf::from("data/market.skg"),
            backend: Backend::None,
            output: OutputFormat::Table,
            log_level: "warn".into(),
        }
    }
}

impl AppConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Reads `file` if given, else `$STOCKGRAPH_CONFIG`, else
    /// `./stockgraph.toml` when present, else defaults; then applies the
    /// environment overrides and validates.
    pub fn load(file: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let path = file
            .map(Path::to_path_buf)
            .or_else(|| env(CONFIG_ENV).map(PathBuf::from))
            .or_else(|| {
                let p = PathBuf::from(DEFAULT_CONFIG_FILE);
                p.exists().then_some(p)
            });
        let mut cfg = match path {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Read {
                    path: path.clone(),
                    source,
                })?;
                AppConfig::from_toml(&text, &path)?
            }
            None => AppConfig::default(),
        };
        cfg.apply_env(env)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// `STOCKGRAPH_DATA_DIR`, `STOCKGRAPH_SNAPSHOT_PATH`, `STOCKGRAPH_OUTPUT`,
    /// `STOCKGRAPH_LOG_LEVEL`, `STOCKGRAPH_BACKEND_URL` (`none` disables the
    /// backend), `STOCKGRAPH_BACKEND_TIMEOUT_S` and `STOCKGRAPH_BACKEND_FALLBACK`.
    pub fn apply_env(&mut self, env: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        let bad = |key: &str, message: String| ConfigError::Env {
            key: key.into(),
            message,
        };
        if let Some(v) = env("STOCKGRAPH_DATA_DIR") {
            self.data_dir = v.into();
        }
        if let Some(v) = env("STOCKGRAPH_SNAPSHOT_PATH") {
            self.snapshot_path = v.into();
        }
        if let Some(v) = env("STOCKGRAPH_OUTPUT") {
            self.output = match v.to_ascii_lowercase().as_str() {
                "table" => OutputFormat::Table,
                "json" => OutputFormat::Json,
                _ => return Err(bad("STOCKGRAPH_OUTPUT", format!("{v:?} is not table or json"))),
            };
        }
        if let Some(v) = env("STOCKGRAPH_LOG_LEVEL") {
            self.log_level = v;
        }
        if let Some(v) = env("STOCKGRAPH_BACKEND_URL") {
            self.backend = if v.eq_ignore_ascii_case("none") || v.is_empty() {
                Backend::None
            } else {
                let (timeout_s, fallback) = match &self.backend {
                    Backend::External {
                        timeout_s, fallback, ..
                    } => (*timeout_s, *fallback),
                    Backend::None => (DEFAULT_TIMEOUT_S, true),
                };
                Backend::External {
                    url: v,
                    timeout_s,
                    fallback,
                }
            };
        }
        if let Some(v) = env("STOCKGRAPH_BACKEND_TIMEOUT_S") {
            let t: u64 = v
                .parse()
                .map_err(|_| bad("STOCKGRAPH_BACKEND_TIMEOUT_S", format!("{v:?} is not a whole number")))?;
            if let Backend::External { timeout_s, .. } = &mut self.backend {
                *timeout_s = t;
            }
        }
        if let Some(v) = env("STOCKGRAPH_BACKEND_FALLBACK") {
            let f = match v.to_ascii_lowercase().as_str() {
                "1" | "true" | "yes" => true,
                "0" | "false" | "no" => false,
                _ => {
                    return Err(bad(
                        "STOCKGRAPH_BACKEND_FALLBACK",
                        format!("{v:?} is not true or false"),
                    ))
                }
            };
            if let Backend::External { fallback, .. } = &mut self.backend {
                *fallback = f;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.data_dir.as_os_str().is_empty() {
            return Err(ConfigError::Invalid("data_dir is empty".into()));
        }
        if self.snapshot_path.as_os_str().is_empty() {
            return Err(ConfigError::Invalid("snapshot_path is empty".into()));
        }
        if let Backend::External { url, timeout_s, .. } = &self.backend {
            if url.is_empty() {
                return Err(ConfigError::Invalid("backend url is empty".into()));
            }
            if *timeout_s < 1 {
                return Err(ConfigError::Invalid("backend timeout_s must be at least 1".into()));
            }
        }
        Ok(())
    }
}

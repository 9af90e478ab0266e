//! Service settings and the key-value configuration file.
//!
//! The file holds one `key = value` pair per line; `#` starts a comment and
//! blank lines are ignored. Keys are the long names of command-line flags,
//! with `-` or `_`, for example:
//!
//! ```text
//! # cubq.conf
//! port = 8737
//! workers = 2
//! cache-dir = /var/cache/cubq
//! orbit-budget = 4096
//! ```
//!
//! Precedence, highest first: command line, environment (`CUBQ_PORT`,
//! `CUBQ_WORKERS`, `CUBQ_CACHE_DIR`), configuration file, built-in default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_PORT: u16 = 8737;
pub const DEFAULT_WORKERS: usize = 2;
/// How long a tile request waits for its job before answering 503.
pub const DEFAULT_WAIT_MS: u64 = 2000;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: String, line: usize },
    #[error("{path}:{line}: empty key")]
    EmptyKey { path: String, line: usize },
    #[error("cannot read config file {path}: {message}")]
    Read { path: String, message: String },
}

/// Parses configuration text into `(key, value)` pairs with keys normalized
/// to `snake_case`.
pub fn parse_config(text: &str, path: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            path: path.to_string(),
            line: n + 1,
        })?;
        let key = k.trim().replace('-', "_");
        if key.is_empty() {
            return Err(ConfigError::EmptyKey {
                path: path.to_string(),
                line: n + 1,
            });
        }
        let value = v.trim().trim_matches('"').to_string();
        out.push((key, value));
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    pub workers: usize,
    pub cache_dir: Option<PathBuf>,
    pub wait_ms: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            host: "127.0.0.1".into(),
            port: DEFAULT_PORT,
            workers: DEFAULT_WORKERS,
            cache_dir: None,
            wait_ms: DEFAULT_WAIT_MS,
        }
    }
}

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub const KEYS: [&str; 8] = [
    "alpha",
    "r",
    "eta",
    "quad",
    "out",
    "threads",
    "level",
    "swap_corrections",
];

/// `key = value` settings; blank lines and `#` comments are skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("config line {}: expected key=value", no + 1))
            })?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!(
                    "config line {}: unknown key {key:?}",
                    no + 1
                )));
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::usage(format!(
                    "config line {}: duplicate key {key:?}",
                    no + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Command-line value first, then the file, then `default`.
    pub fn pick<'a>(&'a self, flag: Option<&'a str>, key: &str, default: &'a str) -> &'a str {
        flag.or_else(|| self.get(key)).unwrap_or(default)
    }
}

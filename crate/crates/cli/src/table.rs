use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub const SIGNIFICANT_DIGITS: i32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

/// Twelve significant digits with trailing zeros kept. Plain decimals for exponents in
/// `[−6, 12)`, scientific notation outside, `nan` for non-finite values.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    // round first so the exponent reflects the printed mantissa
    let sci = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-6..SIGNIFICANT_DIGITS).contains(&exp) {
        return sci;
    }
    let decimals = (SIGNIFICANT_DIGITS - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// CSV with a single `#` metadata line ahead of the header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, details: &str, header: Vec<&'static str>) -> Self {
        Self {
            metadata: format!("ecs-epp {} {command} {details}", env!("CARGO_PKG_VERSION")),
            header,
            rows: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.metadata);
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_number(*x),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

//! Income file ingestion.
//!
//! One income per row, optionally taken from a selected column. Blank lines
//! are skipped; bad rows are collected with their line numbers instead of
//! aborting the load.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::distributions::IncomeSample;
use crate::error::{FgtError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    /// Comma if the row contains one, otherwise runs of whitespace.
    Auto,
    Whitespace,
    Char(char),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Skip the first nonblank line.
    pub header: bool,
    /// Zero-based column index.
    pub column: usize,
    pub delimiter: Delimiter,
    /// Treat any row error as fatal.
    pub strict: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            header: false,
            column: 0,
            delimiter: Delimiter::Auto,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// One-based line number in the file.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Parsed income file: accepted values plus the rows that were rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct IncomeFile {
    pub path: PathBuf,
    pub values: Vec<f64>,
    pub row_errors: Vec<RowError>,
}

impl IncomeFile {
    pub fn into_sample(self) -> Result<IncomeSample> {
        IncomeSample::new(self.values)
    }
}

fn split_fields(line: &str, delimiter: Delimiter) -> Vec<&str> {
    match delimiter {
        Delimiter::Auto if line.contains(',') => line.split(',').map(str::trim).collect(),
        Delimiter::Auto | Delimiter::Whitespace => line.split_whitespace().collect(),
        Delimiter::Char(c) => line.split(c).map(str::trim).collect(),
    }
}

fn parse_row(line: &str, line_no: usize, options: &LoadOptions) -> std::result::Result<f64, String> {
    let fields = split_fields(line, options.delimiter);
    let field = fields
        .get(options.column)
        .ok_or_else(|| format!("missing column {} at line {line_no}", options.column))?;
    let value: f64 = field
        .parse()
        .map_err(|_| format!("cannot parse {field:?} as a number at line {line_no}"))?;
    if !value.is_finite() {
        return Err(format!("non-finite income at line {line_no}"));
    }
    if value < 0.0 {
        return Err(format!("negative income at line {line_no}"));
    }
    Ok(value)
}

/// Parse an income file, keeping per-row errors.
pub fn read_income_file(path: &Path, options: &LoadOptions) -> Result<IncomeFile> {
    let text = std::fs::read_to_string(path).map_err(|source| FgtError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut values = Vec::new();
    let mut row_errors = Vec::new();
    let mut header_pending = options.header;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        match parse_row(line, i + 1, options) {
            Ok(v) => values.push(v),
            Err(message) => row_errors.push(RowError { line: i + 1, message }),
        }
    }
    if values.is_empty() || (options.strict && !row_errors.is_empty()) {
        return Err(FgtError::NoValidRows {
            path: path.to_path_buf(),
            errors: row_errors.into_iter().map(|e| e.message).collect(),
        });
    }
    Ok(IncomeFile {
        path: path.to_path_buf(),
        values,
        row_errors,
    })
}

/// Load the accepted incomes of a file as a sample.
pub fn load_incomes(path: &Path, options: &LoadOptions) -> Result<IncomeSample> {
    read_income_file(path, options)?.into_sample()
}

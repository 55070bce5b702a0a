//! Shared plumbing for the tab-separated file formats.
//!
//! Every persisted table is UTF-8 with LF line endings and a fixed header.
//! Free-text cells escape backslash, tab, CR and LF as `\\`, `\t`, `\r`, `\n`.

use std::borrow::Cow;
use std::io::{self, BufRead};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TsvError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line 1: expected header {expected:?}, found {found:?}")]
    Header { expected: String, found: String },
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
}

impl TsvError {
    pub fn row(line: usize, message: impl Into<String>) -> Self {
        TsvError::Row {
            line,
            message: message.into(),
        }
    }

    /// Line number the error refers to, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            TsvError::Io(_) => None,
            TsvError::Header { .. } => Some(1),
            TsvError::Row { line, .. } => Some(*line),
        }
    }
}

pub fn escape(cell: &str) -> Cow<'_, str> {
    if !cell.contains(['\\', '\t', '\n', '\r']) {
        return Cow::Borrowed(cell);
    }
    let mut out = String::with_capacity(cell.len() + 4);
    for c in cell.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    Cow::Owned(out)
}

pub fn unescape(cell: &str, line: usize) -> Result<String, TsvError> {
    if !cell.contains('\\') {
        return Ok(cell.to_string());
    }
    let mut out = String::with_capacity(cell.len());
    let mut chars = cell.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => {
                return Err(TsvError::row(line, format!("unknown escape \\{other}")));
            }
            None => return Err(TsvError::row(line, "dangling backslash")),
        }
    }
    Ok(out)
}

/// A numbered line of a table (1-based, counting the header as line 1).
pub struct Line {
    pub number: usize,
    pub text: String,
}

impl Line {
    pub fn cells(&self, expected: usize) -> Result<Vec<&str>, TsvError> {
        let cells: Vec<&str> = self.text.split('\t').collect();
        if cells.len() != expected {
            return Err(TsvError::row(
                self.number,
                format!("expected {expected} columns, found {}", cells.len()),
            ));
        }
        Ok(cells)
    }
}

/// Reads all lines, LF-terminated; a final line without terminator is accepted.
pub fn read_lines<R: BufRead>(source: R) -> Result<Vec<Line>, TsvError> {
    source
        .lines()
        .enumerate()
        .map(|(i, l)| {
            l.map(|text| Line { number: i + 1, text })
                .map_err(TsvError::from)
        })
        .collect()
}

/// Splits off leading `# key: value` comment lines, then checks the header.
/// Returns the comments (key, raw value) and the remaining data lines.
pub fn split_table(
    lines: Vec<Line>,
    header: &str,
) -> Result<(Vec<(String, String, usize)>, Vec<Line>), TsvError> {
    let mut iter = lines.into_iter().peekable();
    let mut comments = Vec::new();
    while let Some(line) = iter.peek() {
        let Some(rest) = line.text.strip_prefix("# ") else {
            break;
        };
        let Some((key, value)) = rest.split_once(": ").or_else(|| rest.split_once('=')) else {
            return Err(TsvError::row(line.number, "malformed comment line"));
        };
        comments.push((key.to_string(), value.to_string(), line.number));
        iter.next();
    }
    match iter.next() {
        Some(line) if line.text == header => {}
        Some(line) => {
            return Err(TsvError::Header {
                expected: header.to_string(),
                found: line.text,
            })
        }
        None => {
            return Err(TsvError::Header {
                expected: header.to_string(),
                found: String::new(),
            })
        }
    }
    Ok((comments, iter.collect()))
}

/// Splits a comma-separated multi-value cell; empty cell means no values.
pub fn split_list(cell: &str) -> Vec<String> {
    if cell.trim().is_empty() {
        return Vec::new();
    }
    cell.split(',').map(|v| v.trim().to_string()).collect()
}

pub fn join_list<S: AsRef<str>>(values: &[S]) -> String {
    values
        .iter()
        .map(|v| v.as_ref())
        .collect::<Vec<_>>()
        .join(", ")
}

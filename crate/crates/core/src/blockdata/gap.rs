//! Reader and writer for the bracketed list-of-lists display GAP prints for
//! integer matrices, e.g.
//!
//! ```text
//! [ [ 1, 0, 0 ],
//!   [ 1, 1, 0 ] ]
//! ```
//!
//! Grammar: `matrix := '[' row (',' row)* ']'`, `row := '[' int (',' int)* ']'`,
//! where `int` is an optionally signed decimal literal. Whitespace, including
//! newlines, may appear between any two tokens.

use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::exactmat::{IntMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GapParseError {
    #[error("parse error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    /// `row` is 1-based.
    #[error("ragged row {row}")]
    Ragged { row: usize },
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn error(&self, message: impl Into<String>) -> GapParseError {
        GapParseError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), GapParseError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(got) => Err(self.error(format!("expected `{c}`, found `{got}`"))),
            None => Err(self.error(format!("expected `{c}`, found end of input"))),
        }
    }

    fn integer(&mut self) -> Result<BigInt, GapParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut end = start;
        if end < bytes.len() && (bytes[end] == b'-' || bytes[end] == b'+') {
            end += 1;
        }
        let digits_start = end;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end == digits_start {
            return Err(match self.text[start..].chars().next() {
                Some(c) => self.error(format!("expected an integer, found `{c}`")),
                None => self.error("expected an integer, found end of input"),
            });
        }
        let literal = self.text[start..end].trim_start_matches('+');
        let value = BigInt::from_str(literal).map_err(|e| self.error(e.to_string()))?;
        self.pos = end;
        Ok(value)
    }

    fn row(&mut self) -> Result<Vec<BigInt>, GapParseError> {
        self.expect('[')?;
        let mut row = vec![self.integer()?];
        loop {
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    row.push(self.integer()?);
                }
                Some(']') => {
                    self.pos += 1;
                    return Ok(row);
                }
                Some(c) => return Err(self.error(format!("expected `,` or `]`, found `{c}`"))),
                None => return Err(self.error("unterminated row")),
            }
        }
    }
}

pub fn parse_gap_display(text: &str) -> Result<IntMatrix, GapParseError> {
    let mut cur = Cursor { text, pos: 0 };
    cur.expect('[')?;
    let mut rows = vec![cur.row()?];
    loop {
        match cur.peek() {
            Some(',') => {
                cur.pos += 1;
                rows.push(cur.row()?);
            }
            Some(']') => {
                cur.pos += 1;
                break;
            }
            Some(c) => return Err(cur.error(format!("expected `,` or `]`, found `{c}`"))),
            None => return Err(cur.error("unterminated matrix")),
        }
    }
    if let Some(c) = cur.peek() {
        return Err(cur.error(format!("unexpected `{c}` after matrix")));
    }
    IntMatrix::from_rows(rows).map_err(|e| match e {
        MatrixError::Ragged { row, .. } => GapParseError::Ragged { row },
        other => GapParseError::Syntax {
            offset: 0,
            message: other.to_string(),
        },
    })
}

/// GAP-style display: one row per line, continuation rows indented by two.
pub fn format_gap_display(m: &IntMatrix) -> String {
    if m.rows() == 0 {
        return "[  ]".to_string();
    }
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(ToString::to_string).collect();
            format!("[ {} ]", cells.join(", "))
        })
        .collect();
    format!("[ {} ]", rows.join(",\n  "))
}

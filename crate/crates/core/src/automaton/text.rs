//! Plain-text automaton format.
//!
//! ```text
//! # comment
//! n k
//! δ(0,0) … δ(0,k-1)
//! …
//! δ(n-1,0) … δ(n-1,k-1)
//! ```
//!
//! Everything after `#` on a line is ignored, as are blank lines.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::Dfa;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn parse_numbers(line_no: usize, line: &str) -> Result<Vec<usize>, ParseError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| err(line_no, format!("expected a non-negative integer, found {tok:?}")))
        })
        .collect()
}

impl FromStr for Dfa {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rows = s.lines().enumerate().filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("").trim();
            (!content.is_empty()).then_some((i + 1, content))
        });

        let (header_line, header) = rows.next().ok_or_else(|| err(1, "missing `n k` header"))?;
        let dims = parse_numbers(header_line, header)?;
        let [n, k] = dims[..] else {
            return Err(err(header_line, "header must be exactly `n k`"));
        };
        if n == 0 {
            return Err(err(header_line, "state count must be at least 1"));
        }
        if k == 0 {
            return Err(err(header_line, "alphabet size must be at least 1"));
        }

        let mut delta = Vec::with_capacity(n * k);
        let mut last_line = header_line;
        for q in 0..n {
            let (line_no, row) = rows
                .next()
                .ok_or_else(|| err(last_line + 1, format!("missing transition row for state {q}")))?;
            last_line = line_no;
            let targets = parse_numbers(line_no, row)?;
            if targets.len() != k {
                return Err(err(
                    line_no,
                    format!("state {q} has {} transitions, expected {k}", targets.len()),
                ));
            }
            if let Some(&t) = targets.iter().find(|&&t| t >= n) {
                return Err(err(
                    line_no,
                    format!("target {t} out of range for {n} states"),
                ));
            }
            delta.extend(targets);
        }
        if let Some((line_no, _)) = rows.next() {
            return Err(err(line_no, format!("unexpected content after {n} rows")));
        }
        Dfa::new(n, k, delta).map_err(|e| err(header_line, e.to_string()))
    }
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.num_states(), self.alphabet_size())?;
        for row in self.table().chunks(self.alphabet_size()) {
            let cells: Vec<String> = row.iter().map(|t| t.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

//! `.cspace` text and JSON encodings of colored spaces.
//!
//! Text: the first line is `n c`; then, for each `i = 0..n-2`, one line with the
//! colors `r(i, j)` for `j = i+1..n-1`, separated by spaces. `#` starts a comment
//! that runs to the end of the line. Blank lines are ignored.
//!
//! JSON: `{"n":…,"colors":…,"pairs":[[i,j,color],…]}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{pairs, Color, ColoredSpace, SpaceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

impl Format {
    /// JSON when the first non-blank character is `{`, text otherwise.
    pub fn detect(input: &str) -> Format {
        match input.trim_start().chars().next() {
            Some('{') => Format::Json,
            _ => Format::Text,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" | "cspace" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected text or json)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid space: {0}")]
    Invariant(#[from] SpaceError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceJson {
    n: usize,
    colors: usize,
    pairs: Vec<[usize; 3]>,
}

pub fn parse_space(input: &str, format: Format) -> Result<ColoredSpace, ParseError> {
    match format {
        Format::Text => {
            let mut lines = ContentLines::new(input);
            let space = parse_text_record(&mut lines)?
                .ok_or_else(|| syntax(lines.last_line.max(1), "empty input"))?;
            if let Some((line, _)) = lines.next() {
                return Err(syntax(line, "unexpected content after the last row"));
            }
            Ok(space)
        }
        Format::Json => parse_json(input),
    }
}

/// Parses with the format chosen by [`Format::detect`].
pub fn parse_auto(input: &str) -> Result<ColoredSpace, ParseError> {
    parse_space(input, Format::detect(input))
}

/// Parses a stream of consecutive text records (as produced by enumeration).
pub fn parse_text_stream(input: &str) -> Result<Vec<ColoredSpace>, ParseError> {
    let mut lines = ContentLines::new(input);
    let mut out = Vec::new();
    while let Some(space) = parse_text_record(&mut lines)? {
        out.push(space);
    }
    Ok(out)
}

pub fn serialize_space(space: &ColoredSpace, format: Format) -> String {
    match format {
        Format::Text => to_text(space),
        Format::Json => to_json(space),
    }
}

pub fn to_text(space: &ColoredSpace) -> String {
    let n = space.n();
    let mut out = format!("{} {}\n", n, space.color_count());
    for i in 0..n - 1 {
        for j in i + 1..n {
            if j > i + 1 {
                out.push(' ');
            }
            let _ = write!(out, "{}", space.color(i, j));
        }
        out.push('\n');
    }
    out
}

pub fn to_json(space: &ColoredSpace) -> String {
    let doc = SpaceJson {
        n: space.n(),
        colors: space.color_count(),
        pairs: pairs(space.n())
            .map(|(i, j)| [i, j, space.color(i, j) as usize])
            .collect(),
    };
    serde_json::to_string(&doc).expect("space JSON is always serializable")
}

fn parse_json(input: &str) -> Result<ColoredSpace, ParseError> {
    let doc: SpaceJson =
        serde_json::from_str(input).map_err(|e| syntax(e.line(), e.to_string()))?;
    let mut assignments = Vec::with_capacity(doc.pairs.len());
    for [i, j, c] in doc.pairs {
        let color = u8::try_from(c).map_err(|_| SpaceError::ColorOutOfRange {
            i,
            j,
            color: c,
            count: doc.colors,
        })?;
        assignments.push(((i, j), Color(color)));
    }
    Ok(ColoredSpace::new(doc.n, doc.colors, assignments)?)
}

/// Non-empty lines with comments stripped, tagged with 1-based line numbers.
struct ContentLines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> ContentLines<'a> {
    fn new(input: &'a str) -> Self {
        ContentLines {
            inner: input.lines().enumerate(),
            last_line: 0,
        }
    }
}

impl<'a> Iterator for ContentLines<'a> {
    type Item = (usize, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        for (idx, raw) in self.inner.by_ref() {
            self.last_line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if !content.is_empty() {
                return Some((idx + 1, content));
            }
        }
        None
    }
}

fn parse_numbers(line: usize, content: &str) -> Result<Vec<usize>, ParseError> {
    content
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| syntax(line, format!("`{tok}` is not a non-negative integer")))
        })
        .collect()
}

fn parse_text_record(lines: &mut ContentLines<'_>) -> Result<Option<ColoredSpace>, ParseError> {
    let Some((header_line, header)) = lines.next() else {
        return Ok(None);
    };
    let header = parse_numbers(header_line, header)?;
    let [n, colors] = header[..] else {
        return Err(syntax(header_line, "header must be `n c`"));
    };
    if n < 2 {
        return Err(SpaceError::TooFewPoints(n).into());
    }
    if n > crate::space::MAX_POINTS {
        return Err(SpaceError::TooManyPoints(n).into());
    }
    let mut assignments = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n - 1 {
        let (line, content) = lines.next().ok_or_else(|| {
            syntax(
                lines.last_line + 1,
                format!("missing row {i}: expected {} rows after the header", n - 1),
            )
        })?;
        let row = parse_numbers(line, content)?;
        if row.len() != n - 1 - i {
            return Err(syntax(
                line,
                format!("row {i} has {} colors, expected {}", row.len(), n - 1 - i),
            ));
        }
        for (offset, c) in row.into_iter().enumerate() {
            let j = i + 1 + offset;
            let color = u8::try_from(c).map_err(|_| SpaceError::ColorOutOfRange {
                i,
                j,
                color: c,
                count: colors,
            })?;
            assignments.push(((i, j), Color(color)));
        }
    }
    Ok(Some(ColoredSpace::new(n, colors, assignments)?))
}

use std::fmt;
use std::str::FromStr;

use super::ParseError;

/// 1-based line and column of a token in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub loc: Location,
}

impl<'a> Token<'a> {
    pub fn parse<T: FromStr>(&self, what: &str) -> Result<T, ParseError> {
        self.text.parse().map_err(|_| ParseError::Syntax {
            loc: self.loc,
            reason: format!("expected {what}, found {:?}", self.text),
        })
    }

    /// Non-negative integer time no larger than `u32::MAX`, so sums of many
    /// of them cannot overflow.
    pub fn bounded_time(&self, what: &str) -> Result<u64, ParseError> {
        let value: u64 = self.parse(what)?;
        if value > u64::from(u32::MAX) {
            return Err(ParseError::Syntax {
                loc: self.loc,
                reason: format!("{what} exceeds {}", u32::MAX),
            });
        }
        Ok(value)
    }

    /// Strictly positive integer duration.
    pub fn duration(&self) -> Result<u64, ParseError> {
        let value = self.bounded_time("a processing time")?;
        if value == 0 {
            return Err(ParseError::Syntax {
                loc: self.loc,
                reason: "processing time must be positive".into(),
            });
        }
        Ok(value)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Line<'a> {
    pub number: usize,
    pub tokens: Vec<Token<'a>>,
}

impl Line<'_> {
    pub fn loc(&self) -> Location {
        self.tokens.first().map_or(
            Location {
                line: self.number,
                column: 1,
            },
            |t| t.loc,
        )
    }

    /// Location just past the last token, for "missing token" errors.
    pub fn end_loc(&self) -> Location {
        self.tokens.last().map_or(self.loc(), |t| Location {
            line: t.loc.line,
            column: t.loc.column + t.text.chars().count(),
        })
    }
}

/// A source line after comment removal: either content or a blank separator.
#[derive(Clone, Debug)]
pub(crate) enum Row<'a> {
    Blank,
    Content(Line<'a>),
}

/// Splits text into rows. `#` lines are dropped, blank lines are kept as
/// separators (only the setup-matrix section cares about them).
pub(crate) fn rows(text: &str) -> Vec<Row<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let number = i + 1;
            if raw.trim_start().starts_with('#') {
                return None;
            }
            let mut tokens = Vec::new();
            let mut start: Option<(usize, usize)> = None;
            let mut column = 0;
            for (byte, ch) in raw.char_indices() {
                column += 1;
                if ch.is_whitespace() {
                    if let Some((b, c)) = start.take() {
                        tokens.push(Token {
                            text: &raw[b..byte],
                            loc: Location { line: number, column: c },
                        });
                    }
                } else if start.is_none() {
                    start = Some((byte, column));
                }
            }
            if let Some((b, c)) = start {
                tokens.push(Token {
                    text: &raw[b..],
                    loc: Location { line: number, column: c },
                });
            }
            Some(if tokens.is_empty() {
                Row::Blank
            } else {
                Row::Content(Line { number, tokens })
            })
        })
        .collect()
}

/// Cursor over rows that skips blank separators unless asked not to.
pub(crate) struct Cursor<'a> {
    rows: Vec<Row<'a>>,
    pos: usize,
    eof: Location,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str) -> Self {
        Cursor {
            rows: rows(text),
            pos: 0,
            eof: Location {
                line: text.lines().count() + 1,
                column: 1,
            },
        }
    }

    pub fn eof(&self) -> Location {
        self.eof
    }

    pub fn next_line(&mut self, what: &str) -> Result<Line<'a>, ParseError> {
        while let Some(row) = self.rows.get(self.pos) {
            self.pos += 1;
            if let Row::Content(line) = row {
                return Ok(line.clone());
            }
        }
        Err(ParseError::Syntax {
            loc: self.eof,
            reason: format!("unexpected end of input, expected {what}"),
        })
    }

    /// Remaining rows, blanks included.
    pub fn rest(&mut self) -> Vec<Row<'a>> {
        let rest = self.rows[self.pos..].to_vec();
        self.pos = self.rows.len();
        rest
    }

    pub fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.rest().into_iter().find_map(|r| match r {
            Row::Content(line) => Some(line),
            Row::Blank => None,
        }) {
            Some(line) => Err(ParseError::Syntax {
                loc: line.loc(),
                reason: "unexpected trailing content".into(),
            }),
            None => Ok(()),
        }
    }
}

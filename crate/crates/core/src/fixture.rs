//! Plain-text matrix fixtures.
//!
//! ```text
//! # comment lines start with '#'; "# key: value" lines become metadata
//! 2 3
//! 1,0 0,0 0.5,-1
//! 0,0 1,0 0,0
//! ```
//!
//! A file may hold several matrices back to back. Each block starts with an
//! `n_rows n_cols` line followed by exactly `n_rows` lines of `n_cols` `re,im`
//! pairs. Floats are written with round-trip precision.

use std::fmt::Write as _;

use crate::cstar_algebra::{c64, Mat};
use crate::error::{Error, Result};

/// Parsed fixture: metadata comments plus the matrices in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Fixture {
    pub metadata: Vec<(String, String)>,
    pub comments: Vec<String>,
    pub matrices: Vec<Mat>,
}

impl Fixture {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, m: Mat) {
        self.matrices.push(m);
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse(text: &str) -> Result<Self> {
        if !text.is_ascii() {
            let line = text
                .lines()
                .position(|l| !l.is_ascii())
                .map_or(1, |i| i + 1);
            return Err(fixture_err(line, "fixture must be ASCII"));
        }
        let mut out = Fixture::new();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        while let Some((lineno, line)) = lines.next() {
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                match comment.split_once(':') {
                    Some((k, v)) if !k.trim().is_empty() && !k.contains(' ') => out
                        .metadata
                        .push((k.trim().to_string(), v.trim().to_string())),
                    _ => out.comments.push(comment.to_string()),
                }
                continue;
            }
            let (rows, cols) = parse_header(lineno, line)?;
            let mut m = Mat::zeros(rows, cols);
            let mut filled = 0;
            while filled < rows {
                let Some((rl, row)) = lines.next() else {
                    return Err(fixture_err(
                        lineno,
                        format!("expected {rows} rows, file ended after {filled}"),
                    ));
                };
                if row.starts_with('#') {
                    continue;
                }
                let entries: Vec<&str> = row.split_whitespace().collect();
                if entries.len() != cols {
                    return Err(fixture_err(
                        rl,
                        format!("expected {cols} entries, found {}", entries.len()),
                    ));
                }
                for (j, e) in entries.iter().enumerate() {
                    m[(filled, j)] = parse_entry(rl, e)?;
                }
                filled += 1;
            }
            out.matrices.push(m);
        }
        Ok(out)
    }

    /// Parses a file that must contain exactly one matrix.
    pub fn parse_single(text: &str) -> Result<Mat> {
        let mut f = Self::parse(text)?;
        if f.matrices.len() != 1 {
            return Err(fixture_err(
                0,
                format!("expected one matrix, found {}", f.matrices.len()),
            ));
        }
        Ok(f.matrices.remove(0))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}: {v}");
        }
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        for m in &self.matrices {
            s.push_str(&render_matrix(m));
        }
        s
    }
}

pub fn render_matrix(m: &Mat) -> String {
    let mut s = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:?},{:?}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

fn fixture_err(line: usize, message: impl Into<String>) -> Error {
    Error::Fixture {
        line,
        message: message.into(),
    }
}

fn parse_header(lineno: usize, line: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    let bad = || {
        fixture_err(
            lineno,
            format!("expected \"n_rows n_cols\", found {line:?}"),
        )
    };
    if parts.len() != 2 {
        return Err(bad());
    }
    let rows: usize = parts[0].parse().map_err(|_| bad())?;
    let cols: usize = parts[1].parse().map_err(|_| bad())?;
    if rows == 0 || cols == 0 {
        return Err(fixture_err(lineno, "dimensions must be positive"));
    }
    Ok((rows, cols))
}

fn parse_entry(lineno: usize, entry: &str) -> Result<crate::cstar_algebra::C64> {
    let bad = || fixture_err(lineno, format!("expected \"re,im\", found {entry:?}"));
    let (re, im) = entry.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(fixture_err(lineno, format!("non-finite entry {entry:?}")));
    }
    Ok(c64(re, im))
}

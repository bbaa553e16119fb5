//! Plain matrix files and JSON space files.
//!
//! Plain matrix format: the first non-empty line holds `n`, followed by `n`
//! lines of `n` whitespace-separated reals.
//!
//! Space format: a JSON object with `labels` (optional), either `dist`
//! (`n x n` array) or `coords` (points in Euclidean space), and `mass`
//! (optional, uniform when absent).

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::space::{DistanceMatrix, FiniteMMS, SquareMatrix};

pub fn parse_matrix(text: &str) -> Result<SquareMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let n: usize = header
        .parse()
        .map_err(|_| Error::Parse(format!("expected dimension, found `{header}`")))?;
    let mut rows = Vec::with_capacity(n);
    for (r, line) in lines.enumerate() {
        if r >= n {
            return Err(Error::Parse(format!("more than {n} rows")));
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("row {r}: bad number `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!("row {r} has {} entries, expected {n}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
    }
    SquareMatrix::from_rows(&rows)
}

pub fn format_matrix(m: &SquareMatrix) -> String {
    let mut out = format!("{}\n", m.n());
    for i in 0..m.n() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SquareMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SpaceSpec {
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub dist: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub mass: Option<Vec<f64>>,
}

impl SpaceSpec {
    pub(crate) fn build(self) -> Result<FiniteMMS> {
        let dist = match (self.dist, self.coords) {
            (Some(d), None) => DistanceMatrix::try_from(d)?,
            (None, Some(c)) => {
                if let Some(p) = c.iter().find(|p| p.len() != c[0].len()) {
                    return Err(Error::DimensionMismatch { expected: c[0].len(), actual: p.len() });
                }
                DistanceMatrix::from_euclidean(&c)
            }
            _ => return Err(Error::Parse("exactly one of `dist` or `coords` is required".into())),
        };
        let n = dist.n();
        if n == 0 {
            return Err(Error::Parse("space has no points".into()));
        }
        let mass = self.mass.unwrap_or_else(|| vec![1.0 / n as f64; n]);
        match self.labels {
            Some(l) => FiniteMMS::new(l, dist, mass),
            None => FiniteMMS::unlabeled(dist, mass),
        }
    }
}

pub fn parse_space(json: &str) -> Result<FiniteMMS> {
    serde_json::from_str::<SpaceSpec>(json)?.build()
}

pub fn read_space(path: impl AsRef<Path>) -> Result<FiniteMMS> {
    parse_space(&std::fs::read_to_string(path)?)
}

/// A mass vector as a bare JSON array or as `{"mass": [...]}`.
pub fn parse_mass(json: &str) -> Result<Vec<f64>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum MassFile {
        Bare(Vec<f64>),
        Wrapped { mass: Vec<f64> },
    }
    Ok(match serde_json::from_str::<MassFile>(json)? {
        MassFile::Bare(m) | MassFile::Wrapped { mass: m } => m,
    })
}

pub fn read_mass(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_mass(&std::fs::read_to_string(path)?)
}

//! Delay embedding of scalar series.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pointset::{parse_rows, PointSet};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { line: i + 1 });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Forward delay windows `(x_j, x_{j+delay}, ..., x_{j+(dim-1) delay})`.
pub fn embed(series: &Series, dim: usize, delay: usize) -> Result<PointSet> {
    if dim < 2 {
        return Err(Error::InvalidParam(format!(
            "embedding dimension must be at least 2, got {dim}"
        )));
    }
    if delay < 1 {
        return Err(Error::InvalidParam("delay must be at least 1".into()));
    }
    let len = series.len();
    let span = (dim - 1)
        .checked_mul(delay)
        .filter(|&s| s < len)
        .ok_or(Error::SeriesTooShort { len, dim, delay })?;
    let count = len - span;
    let x = &series.values;
    let mut coords = Vec::with_capacity(count * dim);
    for j in 0..count {
        coords.extend((0..dim).map(|c| x[j + c * delay]));
    }
    PointSet::from_flat(dim, coords)
}

/// Reads a single-column series, or the second column of `iter,value` rows.
pub fn parse_series(bytes: &[u8]) -> Result<Series> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::InvalidParam(format!("input is not utf-8: {e}")))?;
    let (width, values, rows) = parse_rows(text, true, true)?;
    if rows == 0 {
        return Err(Error::EmptyInput);
    }
    match width {
        1 => Series::new(values),
        2 => Series::new(values.chunks_exact(2).map(|r| r[1]).collect()),
        found => Err(Error::MalformedRow {
            line: 1,
            expected: 2,
            found,
        }),
    }
}

/// Writes one value per line.
pub fn write_series(series: &Series) -> String {
    let mut out = String::new();
    for v in &series.values {
        writeln!(out, "{v}").expect("writing to a String cannot fail");
    }
    out
}

//! Point-set model and text I/O.
//!
//! Supported inputs are csv (comma or whitespace delimited), xyz
//! (whitespace delimited) and ascii ply 1.0 vertex lists. Blank lines and
//! lines starting with `#` are skipped in csv and xyz. Output uses Rust's
//! shortest round-trip float formatting, so `parse(write(ps)) == ps` exactly.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An ordered collection of `dim`-dimensional points stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<f64>,
    dim: usize,
    label: Option<String>,
}

impl PointSet {
    /// Builds a point set from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParam("dimension must be at least 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParam(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteValue {
                line: pos / dim + 1,
            });
        }
        Ok(Self {
            coords,
            dim,
            label: None,
        })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::MalformedRow {
                    line: i + 1,
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Applies `f` to every point, producing a new set of the same dimension.
    pub fn map_points(&self, mut f: impl FnMut(&[f64], &mut [f64])) -> Result<Self> {
        let mut coords = vec![0.0; self.coords.len()];
        for (src, dst) in self
            .coords
            .chunks_exact(self.dim)
            .zip(coords.chunks_exact_mut(self.dim))
        {
            f(src, dst);
        }
        let mut out = Self::from_flat(self.dim, coords)?;
        out.label = self.label.clone();
        Ok(out)
    }

    /// Keeps the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self {
            coords,
            dim: self.dim,
            label: self.label.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Xyz,
    PlyAscii,
    Auto,
}

impl Format {
    /// Picks a format from a file extension; unknown extensions give `Auto`.
    pub fn from_path(path: &Path) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("csv") | Some("txt") => Format::Csv,
            Some("xyz") | Some("pts") => Format::Xyz,
            Some("ply") => Format::PlyAscii,
            _ => Format::Auto,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "xyz" => Ok(Format::Xyz),
            "ply" | "ply-ascii" => Ok(Format::PlyAscii),
            "auto" => Ok(Format::Auto),
            other => Err(Error::InvalidParam(format!("unknown format `{other}`"))),
        }
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim();
        (!t.is_empty() && !t.starts_with('#')).then_some((i + 1, t))
    })
}

fn sniff(text: &str) -> Format {
    match data_lines(text).next() {
        Some((_, "ply")) => Format::PlyAscii,
        Some((_, first)) if first.contains(',') => Format::Csv,
        _ => Format::Xyz,
    }
}

fn split_fields(line: &str, commas: bool) -> Vec<&str> {
    if commas && line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::InvalidNumber {
        line,
        token: token.to_string(),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFiniteValue { line });
    }
    Ok(v)
}

fn is_header_row(fields: &[&str]) -> bool {
    fields
        .iter()
        .all(|f| f.parse::<f64>().is_err() && f.chars().any(|c| c.is_ascii_alphabetic()))
}

/// Parses delimited rows of numbers. A leading row made only of names
/// (`x,y,z`) is treated as a header when `allow_header` is set.
pub(crate) fn parse_rows(
    text: &str,
    commas: bool,
    allow_header: bool,
) -> Result<(usize, Vec<f64>, usize)> {
    let mut width = 0usize;
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (idx, (line_no, line)) in data_lines(text).enumerate() {
        let fields = split_fields(line, commas);
        if idx == 0 && allow_header && is_header_row(&fields) {
            continue;
        }
        if rows == 0 {
            width = fields.len();
        } else if fields.len() != width {
            return Err(Error::MalformedRow {
                line: line_no,
                expected: width,
                found: fields.len(),
            });
        }
        for f in &fields {
            if f.is_empty() {
                return Err(Error::InvalidNumber {
                    line: line_no,
                    token: String::new(),
                });
            }
            values.push(parse_number(f, line_no)?);
        }
        rows += 1;
    }
    Ok((width, values, rows))
}

/// Parses point-set file content.
pub fn parse_pointset(bytes: &[u8], format: Format) -> Result<PointSet> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::InvalidParam(format!("input is not utf-8: {e}")))?;
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let format = match format {
        Format::Auto => sniff(text),
        f => f,
    };
    match format {
        Format::PlyAscii => parse_ply(text),
        Format::Csv | Format::Xyz => {
            let (dim, coords, rows) = parse_rows(text, format == Format::Csv, true)?;
            if rows == 0 {
                return Err(Error::EmptyInput);
            }
            PointSet::from_flat(dim, coords)
        }
        Format::Auto => unreachable!("auto resolved by sniffing"),
    }
}

fn parse_ply(text: &str) -> Result<PointSet> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(Error::UnsupportedPlyElement("missing `ply` magic".into())),
    }

    let mut vertex_count: Option<usize> = None;
    let mut props: Vec<String> = Vec::new();
    let mut in_vertex = false;
    let mut saw_format = false;
    loop {
        let Some((line_no, line)) = lines.next() else {
            return Err(Error::UnsupportedPlyElement("missing end_header".into()));
        };
        let mut tok = line.split_whitespace();
        match tok.next() {
            None | Some("comment") | Some("obj_info") => {}
            Some("format") => {
                let kind = tok.next().unwrap_or("");
                let version = tok.next().unwrap_or("");
                if kind != "ascii" || version != "1.0" {
                    return Err(Error::UnsupportedPlyElement(format!(
                        "format `{kind} {version}` (only ascii 1.0)"
                    )));
                }
                saw_format = true;
            }
            Some("element") => {
                let name = tok.next().unwrap_or("");
                if name != "vertex" || vertex_count.is_some() {
                    return Err(Error::UnsupportedPlyElement(format!("element `{name}`")));
                }
                let count = tok.next().and_then(|c| c.parse().ok()).ok_or_else(|| {
                    Error::UnsupportedPlyElement(format!("line {line_no}: bad vertex count"))
                })?;
                vertex_count = Some(count);
                in_vertex = true;
            }
            Some("property") => {
                if !in_vertex {
                    return Err(Error::UnsupportedPlyElement(
                        "property outside vertex element".into(),
                    ));
                }
                let ty = tok.next().unwrap_or("");
                let name = tok.next().unwrap_or("");
                let float_ty = matches!(ty, "float" | "double" | "float32" | "float64");
                if !float_ty || !matches!(name, "x" | "y" | "z") || props.iter().any(|p| p == name)
                {
                    return Err(Error::UnsupportedPlyElement(format!(
                        "vertex property `{ty} {name}`"
                    )));
                }
                props.push(name.to_string());
            }
            Some("end_header") => break,
            Some(other) => {
                return Err(Error::UnsupportedPlyElement(format!(
                    "line {line_no}: unknown header keyword `{other}`"
                )))
            }
        }
    }
    if !saw_format {
        return Err(Error::UnsupportedPlyElement("missing format line".into()));
    }
    let count =
        vertex_count.ok_or_else(|| Error::UnsupportedPlyElement("no vertex element".into()))?;
    if props.len() != 3 {
        return Err(Error::UnsupportedPlyElement(
            "vertex element needs x, y and z".into(),
        ));
    }
    // Column index of x, y, z in the file's property order.
    let order: Vec<usize> = ["x", "y", "z"]
        .iter()
        .map(|axis| props.iter().position(|p| p == axis).expect("checked above"))
        .collect();

    let mut coords = Vec::with_capacity(count * 3);
    let mut rows = 0;
    for (line_no, line) in lines {
        if line.is_empty() {
            continue;
        }
        if rows == count {
            return Err(Error::UnsupportedPlyElement(format!(
                "line {line_no}: data beyond {count} vertices"
            )));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::MalformedRow {
                line: line_no,
                expected: 3,
                found: fields.len(),
            });
        }
        let row: Vec<f64> = fields
            .iter()
            .map(|f| parse_number(f, line_no))
            .collect::<Result<_>>()?;
        coords.extend(order.iter().map(|&c| row[c]));
        rows += 1;
    }
    if rows < count {
        return Err(Error::MalformedRow {
            line: 0,
            expected: count,
            found: rows,
        });
    }
    if rows == 0 {
        return Err(Error::EmptyInput);
    }
    PointSet::from_flat(3, coords)
}

/// Serializes a point set as csv or xyz. Ply output is not supported.
pub fn write_pointset(ps: &PointSet, format: Format) -> Result<String> {
    let sep = match format {
        Format::Csv => ",",
        Format::Xyz => " ",
        other => {
            return Err(Error::InvalidParam(format!(
                "cannot write point sets as {other:?}"
            )))
        }
    };
    let mut out = String::with_capacity(ps.coords.len() * 20);
    for p in ps.points() {
        for (j, c) in p.iter().enumerate() {
            if j > 0 {
                out.push_str(sep);
            }
            write!(out, "{c}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_read_back() {
        let ps = parse_pointset(b"0,0\n1,0\n0,1\n", Format::Csv).unwrap();
        assert_eq!(ps.dim(), 2);
        assert_eq!(ps.len(), 3);
        assert_eq!(ps.point(2), &[0.0, 1.0]);
    }

    #[test]
    fn xyz_read_back() {
        let ps = parse_pointset(b"1 2 3\n4 5 6\n", Format::Xyz).unwrap();
        assert_eq!(ps.dim(), 3);
        assert_eq!(ps.point(0), &[1.0, 2.0, 3.0]);
        assert_eq!(ps.point(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn csv_tolerates_comments_blank_lines_whitespace_and_header() {
        let text = "# scan export\nx,y\n\n1, 2\n3 4\n";
        let ps = parse_pointset(text.as_bytes(), Format::Csv).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.point(1), &[3.0, 4.0]);
    }

    #[test]
    fn ply_minimal() {
        let text = "ply\nformat ascii 1.0\ncomment two vertices\nelement vertex 2\n\
                    property float x\nproperty float y\nproperty float z\nend_header\n\
                    0 0 0\n1 1 1\n";
        let ps = parse_pointset(text.as_bytes(), Format::Auto).unwrap();
        assert_eq!(ps.dim(), 3);
        assert_eq!(ps.len(), 2);
        let csv = write_pointset(&ps, Format::Csv).unwrap();
        assert_eq!(parse_pointset(csv.as_bytes(), Format::Csv).unwrap(), ps);
    }

    #[test]
    fn ply_property_order_is_respected() {
        let text = "ply\nformat ascii 1.0\nelement vertex 1\nproperty double z\n\
                    property double x\nproperty double y\nend_header\n3 1 2\n";
        let ps = parse_pointset(text.as_bytes(), Format::PlyAscii).unwrap();
        assert_eq!(ps.point(0), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn ply_rejections() {
        let binary = "ply\nformat binary_little_endian 1.0\nelement vertex 1\n\
                      property float x\nproperty float y\nproperty float z\nend_header\n";
        let face = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n\
                    property float y\nproperty float z\nelement face 0\n\
                    property list uchar int vertex_indices\nend_header\n0 0 0\n";
        let normal = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n\
                      property float y\nproperty float z\nproperty float nx\nend_header\n";
        for text in [binary, face, normal] {
            let err = parse_pointset(text.as_bytes(), Format::PlyAscii).unwrap_err();
            assert_eq!(err.kind(), "UnsupportedPlyElement", "{text}");
        }
    }

    #[test]
    fn error_paths() {
        assert_eq!(parse_pointset(b"", Format::Csv), Err(Error::EmptyInput));
        assert_eq!(
            parse_pointset(b"# only\n\n", Format::Csv),
            Err(Error::EmptyInput)
        );
        assert!(matches!(
            parse_pointset(b"1,2\n3,4,5\n", Format::Csv),
            Err(Error::MalformedRow {
                line: 2,
                expected: 2,
                found: 3
            })
        ));
        assert!(matches!(
            parse_pointset(b"1,2\n3,inf\n", Format::Csv),
            Err(Error::NonFiniteValue { line: 2 })
        ));
        assert!(matches!(
            parse_pointset(b"1 NaN\n", Format::Xyz),
            Err(Error::NonFiniteValue { line: 1 })
        ));
    }

    #[test]
    fn write_single_and_empty() {
        let ps = PointSet::from_points(2, &[[0.0, 0.0]]).unwrap();
        assert_eq!(write_pointset(&ps, Format::Csv).unwrap(), "0,0\n");
        let empty = PointSet::from_flat(3, vec![]).unwrap();
        assert_eq!(write_pointset(&empty, Format::Xyz).unwrap(), "");
    }

    #[test]
    fn sniffing() {
        assert_eq!(sniff("1,2\n"), Format::Csv);
        assert_eq!(sniff("1 2\n"), Format::Xyz);
        assert_eq!(sniff("ply\n"), Format::PlyAscii);
        assert_eq!(Format::from_path(Path::new("a/b.PLY")), Format::PlyAscii);
    }

    proptest! {
        #[test]
        fn write_parse_round_trip(
            dim in 1usize..5,
            raw in proptest::collection::vec(
                any::<f64>().prop_filter("finite", |v| v.is_finite()), 0..300),
            xyz in any::<bool>(),
        ) {
            let n = raw.len() / dim;
            let ps = PointSet::from_flat(dim, raw[..n * dim].to_vec()).unwrap();
            let fmt = if xyz { Format::Xyz } else { Format::Csv };
            let text = write_pointset(&ps, fmt).unwrap();
            if n == 0 {
                prop_assert_eq!(text, "");
            } else {
                let back = parse_pointset(text.as_bytes(), fmt).unwrap();
                prop_assert_eq!(back.coords().iter().map(|c| c.to_bits()).collect::<Vec<_>>(),
                                ps.coords().iter().map(|c| c.to_bits()).collect::<Vec<_>>());
            }
        }
    }
}

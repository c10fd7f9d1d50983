//! Matrix Market exchange format, real symmetric subset.

use std::io::Write;
use std::path::Path;

use crate::dense::SymMatrix;
use crate::error::{Error, Result};

/// Relative asymmetry tolerated in `general` files before rejection.
const SYMMETRY_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmSymmetry {
    Symmetric,
    General,
}

/// A parsed file: the dense matrix plus what the header declared.
#[derive(Clone, Debug)]
pub struct MatrixMarket {
    pub matrix: SymMatrix,
    pub format: MmFormat,
    pub symmetry: MmSymmetry,
    pub rows: usize,
    pub cols: usize,
    /// Number of stored entries announced by the size line (implied for `array`).
    pub declared_entries: usize,
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedFile { line, reason: reason.into() }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<MatrixMarket> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_matrix_market_str(&text)
}

pub fn parse_matrix_market(path: impl AsRef<Path>) -> Result<SymMatrix> {
    read_matrix_market(path).map(|mm| mm.matrix)
}

pub fn parse_matrix_market_str(text: &str) -> Result<MatrixMarket> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, banner) = lines.next().ok_or_else(|| malformed(1, "empty file"))?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(malformed(1, "expected `%%MatrixMarket matrix <format> <field> <symmetry>`"));
    }
    if tokens[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!("object `{}`", tokens[1])));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => MmFormat::Coordinate,
        "array" => MmFormat::Array,
        other => return Err(Error::UnsupportedFormat(format!("format `{other}`"))),
    };
    match tokens[3].as_str() {
        "real" | "double" | "integer" => {}
        other => return Err(Error::UnsupportedFormat(format!("field `{other}`"))),
    }
    let symmetry = match tokens[4].as_str() {
        "symmetric" => MmSymmetry::Symmetric,
        "general" => MmSymmetry::General,
        other => return Err(Error::UnsupportedFormat(format!("symmetry `{other}`"))),
    };

    let mut data_lines = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_no, size_line) = data_lines.next().ok_or_else(|| malformed(2, "missing size line"))?;
    let sizes = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| malformed(size_no, format!("bad size line: {e}")))?;
    let expected_fields = if format == MmFormat::Coordinate { 3 } else { 2 };
    if sizes.len() != expected_fields {
        return Err(malformed(size_no, format!("expected {expected_fields} integers on the size line")));
    }
    let (rows, cols) = (sizes[0], sizes[1]);
    if rows == 0 || cols == 0 {
        return Err(malformed(size_no, "empty matrix"));
    }
    if rows != cols {
        return Err(Error::UnsupportedFormat(format!("non-square {rows}x{cols} matrix")));
    }
    let n = rows;
    let declared_entries = match (format, symmetry) {
        (MmFormat::Coordinate, _) => sizes[2],
        (MmFormat::Array, MmSymmetry::Symmetric) => n * (n + 1) / 2,
        (MmFormat::Array, MmSymmetry::General) => n * n,
    };
    if format == MmFormat::Coordinate && declared_entries > n * n {
        return Err(malformed(size_no, "more entries than matrix positions"));
    }

    let mut dense = vec![0.0; n * n];
    let mut add = |i: usize, j: usize, v: f64| {
        dense[i * n + j] += v;
        if symmetry == MmSymmetry::Symmetric && i != j {
            dense[j * n + i] += v;
        }
    };

    let parse_value = |line_no: usize, tok: &str| {
        tok.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| malformed(line_no, format!("bad value `{tok}`")))
    };

    let mut count = 0usize;
    match format {
        MmFormat::Coordinate => {
            for (line_no, line) in data_lines.by_ref() {
                if count == declared_entries {
                    return Err(malformed(line_no, "more entries than declared"));
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(malformed(line_no, "expected `row col value`"));
                }
                let idx = |t: &str| {
                    t.parse::<usize>()
                        .ok()
                        .filter(|&k| (1..=n).contains(&k))
                        .ok_or_else(|| malformed(line_no, format!("index `{t}` out of range 1..={n}")))
                };
                let (i, j) = (idx(toks[0])? - 1, idx(toks[1])? - 1);
                let v = parse_value(line_no, toks[2])?;
                // stored triangle is mirrored; either triangle is accepted
                let (i, j) = if symmetry == MmSymmetry::Symmetric { (i.max(j), i.min(j)) } else { (i, j) };
                add(i, j, v);
                count += 1;
            }
        }
        MmFormat::Array => {
            let mut positions = (0..n).flat_map(|j| {
                let start = if symmetry == MmSymmetry::Symmetric { j } else { 0 };
                (start..n).map(move |i| (i, j))
            });
            for (line_no, line) in data_lines.by_ref() {
                for tok in line.split_whitespace() {
                    let (i, j) =
                        positions.next().ok_or_else(|| malformed(line_no, "more entries than declared"))?;
                    add(i, j, parse_value(line_no, tok)?);
                    count += 1;
                }
            }
        }
    }
    if count != declared_entries {
        return Err(malformed(
            text.lines().count(),
            format!("found {count} entries, header declares {declared_entries}"),
        ));
    }

    if symmetry == MmSymmetry::General {
        let scale = dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in 0..i {
                let (lo, up) = (dense[i * n + j], dense[j * n + i]);
                let diff = (lo - up).abs();
                if diff > SYMMETRY_RTOL * scale {
                    return Err(Error::NotSymmetric { row: i, col: j, diff });
                }
                let avg = 0.5 * (lo + up);
                dense[i * n + j] = avg;
                dense[j * n + i] = avg;
            }
        }
    }

    Ok(MatrixMarket {
        matrix: SymMatrix::from_row_major(n, dense)?,
        format,
        symmetry,
        rows,
        cols,
        declared_entries,
    })
}

/// Writes the lower triangle in `coordinate real symmetric` form. Values use
/// the shortest representation that parses back to the same bits (zeros of
/// either sign are omitted).
pub fn write_matrix_market<W: Write>(matrix: &SymMatrix, mut out: W) -> std::io::Result<()> {
    let n = matrix.order();
    let entries: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, matrix.get(i, j)))
        .filter(|(_, _, v)| *v != 0.0)
        .collect();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{n} {n} {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

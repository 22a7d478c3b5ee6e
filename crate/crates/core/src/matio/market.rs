//! Matrix Market coordinate I/O and the one-value-per-line vector format.
//!
//! Only the `coordinate` layout is accepted, with `real`, `integer` or
//! `pattern` fields and `general` or `symmetric` symmetry. File indices are
//! 1-based; everything past this module is 0-based.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{DenseVector, Entry, MatrixError, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, message: impl Into<String>) -> MatrixError {
    MatrixError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_banner(line_no: usize, line: &str) -> Result<(Field, Symmetry), MatrixError> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(
            line_no,
            "expected banner `%%MatrixMarket matrix coordinate <field> <symmetry>`",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(
            line_no,
            format!("unsupported object `{}`", tokens[1]),
        ));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(
            line_no,
            format!("unsupported format `{}`", tokens[2]),
        ));
    }
    let field = match tokens[3].as_str() {
        "real" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(line_no, format!("unsupported field `{other}`"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => {
            return Err(parse_err(
                line_no,
                format!("unsupported symmetry `{other}`"),
            ))
        }
    };
    Ok((field, symmetry))
}

fn parse_usize(line_no: usize, token: Option<&str>, what: &str) -> Result<usize, MatrixError> {
    let token = token.ok_or_else(|| parse_err(line_no, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| parse_err(line_no, format!("cannot parse {what} `{token}`")))
}

/// Parses a Matrix Market coordinate file.
///
/// Symmetric files are expanded (off-diagonal entries mirrored), pattern
/// entries get value 1.0 and explicit zeros are dropped. Every error carries
/// the 1-based line number it was detected on.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<SparseMatrix, MatrixError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (field, symmetry) = match lines.next() {
        Some((no, line)) => parse_banner(no, &line?)?,
        None => return Err(parse_err(1, "empty input")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    // (row, col, value, line)
    let mut raw: Vec<(usize, usize, f64, usize)> = Vec::new();
    let mut seen = 0usize;
    let mut last_line = 1;

    for (no, line) in lines {
        let line = line?;
        last_line = no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let Some((m, n, nnz)) = size else {
            let m = parse_usize(no, tokens.next(), "row count")?;
            let n = parse_usize(no, tokens.next(), "column count")?;
            let nnz = parse_usize(no, tokens.next(), "entry count")?;
            if symmetry == Symmetry::Symmetric && m != n {
                return Err(parse_err(
                    no,
                    format!("symmetric matrix must be square, got {m}x{n}"),
                ));
            }
            size = Some((m, n, nnz));
            raw.reserve(if symmetry == Symmetry::Symmetric {
                2 * nnz
            } else {
                nnz
            });
            continue;
        };

        seen += 1;
        if seen > nnz {
            return Err(parse_err(
                no,
                format!("more entries than the declared {nnz}"),
            ));
        }
        let i = parse_usize(no, tokens.next(), "row index")?;
        let j = parse_usize(no, tokens.next(), "column index")?;
        if i == 0 || i > m || j == 0 || j > n {
            return Err(parse_err(
                no,
                format!("index ({i}, {j}) outside declared bounds {m}x{n}"),
            ));
        }
        let value = match field {
            Field::Pattern => 1.0,
            Field::Real | Field::Integer => {
                let token = tokens
                    .next()
                    .ok_or_else(|| parse_err(no, "missing value"))?;
                let v: f64 = token
                    .parse()
                    .map_err(|_| parse_err(no, format!("cannot parse value `{token}`")))?;
                if !v.is_finite() {
                    return Err(parse_err(no, format!("non-finite value `{token}`")));
                }
                v
            }
        };
        raw.push((i - 1, j - 1, value, no));
        if symmetry == Symmetry::Symmetric && i != j {
            raw.push((j - 1, i - 1, value, no));
        }
    }

    let Some((m, n, nnz)) = size else {
        return Err(parse_err(last_line, "missing size line"));
    };
    if seen != nnz {
        return Err(parse_err(
            last_line,
            format!("declared {nnz} entries but found {seen}"),
        ));
    }

    raw.sort_by_key(|&(r, c, _, line)| (r, c, line));
    for w in raw.windows(2) {
        if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
            return Err(parse_err(
                w[1].3,
                format!("duplicate coordinate ({}, {})", w[1].0 + 1, w[1].1 + 1),
            ));
        }
    }

    let entries = raw
        .into_iter()
        .filter(|&(_, _, v, _)| v != 0.0)
        .map(|(r, c, v, _)| Entry::new(r, c, v))
        .collect();
    SparseMatrix::from_entries(m, n, entries)
}

pub fn parse_matrix_market_str(text: &str) -> Result<SparseMatrix, MatrixError> {
    parse_matrix_market(text.as_bytes())
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix, MatrixError> {
    parse_matrix_market(BufReader::new(File::open(path)?))
}

/// Shortest round-trip text for an `f64`, switching to exponent notation
/// for very large or very small magnitudes.
pub(crate) fn format_value(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-6..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Writes `m` as `real general` coordinate text.
pub fn write_matrix_market<W: Write>(m: &SparseMatrix, mut out: W) -> Result<(), MatrixError> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for e in m.entries() {
        writeln!(out, "{} {} {}", e.row + 1, e.col + 1, format_value(e.value))?;
    }
    Ok(())
}

pub fn matrix_market_string(m: &SparseMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix_market(m, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("matrix market output is ASCII")
}

pub fn write_matrix_market_file(
    m: &SparseMatrix,
    path: impl AsRef<Path>,
) -> Result<(), MatrixError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market(m, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Reads a dense vector, one value per line. Blank lines and lines starting
/// with `%` or `#` are skipped.
pub fn parse_vector<R: BufRead>(reader: R) -> Result<DenseVector, MatrixError> {
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| parse_err(i + 1, format!("cannot parse value `{t}`")))?;
        if !v.is_finite() {
            return Err(parse_err(i + 1, format!("non-finite value `{t}`")));
        }
        values.push(v);
    }
    DenseVector::new(values)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<DenseVector, MatrixError> {
    parse_vector(BufReader::new(File::open(path)?))
}

pub fn write_vector<W: Write>(v: &DenseVector, mut out: W) -> Result<(), MatrixError> {
    for x in v.as_slice() {
        writeln!(out, "{}", format_value(*x))?;
    }
    Ok(())
}

pub fn write_vector_file(v: &DenseVector, path: impl AsRef<Path>) -> Result<(), MatrixError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_vector(v, &mut w)?;
    w.flush()?;
    Ok(())
}

//! Matrix Market coordinate format (`real`/`integer`, `general`/`symmetric`).

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{CsrMatrix, SparseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_header(line: &str) -> Result<Symmetry, SparseError> {
    let lower = line.trim().to_ascii_lowercase();
    let mut words = lower.split_whitespace();
    if words.next() != Some("%%matrixmarket") {
        return Err(SparseError::Parse {
            line: 1,
            msg: "missing %%MatrixMarket banner".into(),
        });
    }
    match words.next() {
        Some("matrix") => {}
        other => {
            return Err(SparseError::UnsupportedFormat(format!(
                "object {:?}, expected matrix",
                other.unwrap_or("")
            )))
        }
    }
    match words.next() {
        Some("coordinate") => {}
        other => {
            return Err(SparseError::UnsupportedFormat(format!(
                "format {:?}, expected coordinate",
                other.unwrap_or("")
            )))
        }
    }
    match words.next() {
        Some("real") | Some("integer") => {}
        other => {
            return Err(SparseError::UnsupportedFormat(format!(
                "field {:?}, expected real or integer",
                other.unwrap_or("")
            )))
        }
    }
    match words.next() {
        Some("general") => Ok(Symmetry::General),
        Some("symmetric") => Ok(Symmetry::Symmetric),
        other => Err(SparseError::UnsupportedFormat(format!(
            "symmetry {:?}, expected general or symmetric",
            other.unwrap_or("")
        ))),
    }
}

fn parse_field<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, SparseError> {
    let tok = tok.ok_or_else(|| SparseError::Parse { line, msg: format!("missing {what}") })?;
    tok.parse()
        .map_err(|_| SparseError::Parse { line, msg: format!("cannot parse {what} from {tok:?}") })
}

/// Reads a coordinate-format matrix. Indices are converted to 0-based,
/// symmetric storage is expanded, and duplicate entries are summed.
pub fn read_matrix_market<R: Read>(source: R) -> Result<CsrMatrix, SparseError> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().ok_or(SparseError::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let symmetry = parse_header(&header?)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut seen = 0usize;
    for (lineno, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut toks = t.split_whitespace();
        match size {
            None => {
                let m = parse_field(toks.next(), lineno, "row count")?;
                let n = parse_field(toks.next(), lineno, "column count")?;
                let nnz = parse_field(toks.next(), lineno, "entry count")?;
                if toks.next().is_some() {
                    return Err(SparseError::Parse { line: lineno, msg: "trailing tokens on size line".into() });
                }
                if symmetry == Symmetry::Symmetric && m != n {
                    return Err(SparseError::Parse { line: lineno, msg: "symmetric matrix must be square".into() });
                }
                triplets.reserve(if symmetry == Symmetry::Symmetric { 2 * nnz } else { nnz });
                size = Some((m, n, nnz));
            }
            Some((m, n, nnz)) => {
                if seen == nnz {
                    return Err(SparseError::Parse { line: lineno, msg: format!("more than the declared {nnz} entries") });
                }
                let i: usize = parse_field(toks.next(), lineno, "row index")?;
                let j: usize = parse_field(toks.next(), lineno, "column index")?;
                let v: f64 = parse_field(toks.next(), lineno, "value")?;
                if toks.next().is_some() {
                    return Err(SparseError::Parse { line: lineno, msg: "trailing tokens on entry line".into() });
                }
                if i == 0 || j == 0 || i > m || j > n {
                    return Err(SparseError::Parse {
                        line: lineno,
                        msg: format!("index ({i}, {j}) outside 1..={m} x 1..={n}"),
                    });
                }
                triplets.push((i - 1, j - 1, v));
                if symmetry == Symmetry::Symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
                seen += 1;
            }
        }
    }

    let (m, n, nnz) = size.ok_or(SparseError::Parse { line: 1, msg: "missing size line".into() })?;
    if seen != nnz {
        return Err(SparseError::Parse {
            line: 0,
            msg: format!("declared {nnz} entries but found {seen}"),
        });
    }
    CsrMatrix::from_triplets(m, n, &triplets)
}

pub fn read_matrix_market_file<P: AsRef<Path>>(path: P) -> Result<CsrMatrix, SparseError> {
    read_matrix_market(File::open(path)?)
}

/// Writes `a` as `coordinate real general` with round-trip exact values.
pub fn write_matrix_market<W: Write>(a: &CsrMatrix, mut out: W) -> Result<(), SparseError> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

//! Matrix Market coordinate format (`real`/`integer`/`pattern`,
//! `general`/`symmetric`).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<(Field, Symmetry)> {
    let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_err(lineno, "header must start with %%MatrixMarket"));
    }
    if tokens.len() != 5 {
        return Err(parse_err(
            lineno,
            "header must read `%%MatrixMarket matrix coordinate <field> <symmetry>`",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(lineno, format!("unsupported object `{}`", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(
            lineno,
            format!("unsupported format `{}` (only coordinate)", tokens[2]),
        ));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" | "integer" => Field::Real,
        "pattern" => Field::Pattern,
        other => return Err(Error::UnsupportedField(other.to_string())),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(Error::UnsupportedField(other.to_string())),
    };
    Ok((field, symmetry))
}

pub fn parse_matrix_market<R: Read>(reader: R) -> Result<CsrMatrix> {
    let mut lines = BufReader::new(reader).lines().enumerate();

    let (field, symmetry) = match lines.next() {
        Some((i, line)) => parse_header(&line?, i + 1)?,
        None => return Err(parse_err(1, "empty file")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut last_line = 1;

    for (i, line) in lines {
        let lineno = i + 1;
        last_line = lineno;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let Some((n_rows, n_cols, nnz)) = size else {
            if tokens.len() != 3 {
                return Err(parse_err(lineno, "size line must contain `rows cols entries`"));
            }
            let parse = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(lineno, format!("invalid size value `{t}`")))
            };
            let dims = (parse(tokens[0])?, parse(tokens[1])?, parse(tokens[2])?);
            if symmetry == Symmetry::Symmetric && dims.0 != dims.1 {
                return Err(parse_err(lineno, "symmetric matrix must be square"));
            }
            triplets.reserve(dims.2 * if symmetry == Symmetry::Symmetric { 2 } else { 1 });
            size = Some(dims);
            continue;
        };

        let seen = triplets.len();
        if seen >= nnz * if symmetry == Symmetry::Symmetric { 2 } else { 1 } {
            return Err(parse_err(lineno, format!("more entries than the declared {nnz}")));
        }
        let expected = if field == Field::Pattern { 2 } else { 3 };
        if tokens.len() != expected {
            return Err(parse_err(
                lineno,
                format!("expected {expected} values per entry, found {}", tokens.len()),
            ));
        }
        let index = |t: &str, bound: usize, what: &str| -> Result<usize> {
            let v = t
                .parse::<usize>()
                .map_err(|_| parse_err(lineno, format!("invalid {what} index `{t}`")))?;
            if v == 0 || v > bound {
                return Err(parse_err(
                    lineno,
                    format!("{what} index {v} outside 1..={bound}"),
                ));
            }
            Ok(v - 1)
        };
        let r = index(tokens[0], n_rows, "row")?;
        let c = index(tokens[1], n_cols, "column")?;
        let v = if field == Field::Pattern {
            1.0
        } else {
            tokens[2]
                .parse::<f64>()
                .map_err(|_| parse_err(lineno, format!("invalid value `{}`", tokens[2])))?
        };
        triplets.push((r, c, v));
        if symmetry == Symmetry::Symmetric && r != c {
            triplets.push((c, r, v));
        }
    }

    let Some((n_rows, n_cols, nnz)) = size else {
        return Err(parse_err(last_line, "missing size line"));
    };
    let entries = triplets
        .iter()
        .filter(|(r, c, _)| symmetry == Symmetry::General || r <= c)
        .count();
    let declared = match symmetry {
        Symmetry::General => triplets.len(),
        Symmetry::Symmetric => entries,
    };
    if declared != nnz {
        return Err(parse_err(
            last_line,
            format!("declared {nnz} entries but found {declared}"),
        ));
    }
    CsrMatrix::from_triplets(n_rows, n_cols, triplets)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    parse_matrix_market(File::open(path)?)
}

/// Writes `m` as `real general` with shortest round-trip float formatting.
pub fn write_matrix_market_to<W: Write>(m: &CsrMatrix, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for (r, c, v) in m.triplets() {
        writeln!(w, "{} {} {:?}", r + 1, c + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_market(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_matrix_market_to(m, BufWriter::new(File::create(path)?))
}

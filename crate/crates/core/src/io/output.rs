//! CSV and JSON writers (and matching readers) for distance matrices and
//! neighbor lists. Floats use the shortest representation that parses back
//! to the same bits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::NeighborResult;
use crate::output::DistanceOutput;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    /// Guesses from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidParam(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WriteOptions {
    pub format: OutputFormat,
    /// Emit a column header line in CSV output.
    pub header: bool,
}

/// Anything `write_output` knows how to serialize.
pub enum Output<'a> {
    Distances(&'a DistanceOutput),
    Neighbors(&'a NeighborResult),
}

#[derive(Serialize, Deserialize)]
struct DistanceJson {
    rows: usize,
    cols: usize,
    data: Vec<Vec<f64>>,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborRecord {
    pub query_id: usize,
    pub neighbors: Vec<usize>,
    pub distances: Vec<f64>,
}

fn fmt_f64(v: f64) -> String {
    // `{}` drops a trailing ".0" and never loses bits.
    format!("{v}")
}

pub fn write_output_to<W: Write>(result: Output<'_>, opts: WriteOptions, mut w: W) -> Result<()> {
    match (result, opts.format) {
        (Output::Distances(d), OutputFormat::Csv) => {
            if opts.header {
                let names: Vec<String> = (0..d.cols()).map(|j| format!("c{j}")).collect();
                writeln!(w, "{}", names.join(","))?;
            }
            for i in 0..d.rows() {
                let line: Vec<String> = d.row(i).iter().map(|&v| fmt_f64(v)).collect();
                writeln!(w, "{}", line.join(","))?;
            }
        }
        (Output::Distances(d), OutputFormat::Json) => {
            let doc = DistanceJson {
                rows: d.rows(),
                cols: d.cols(),
                data: d.to_rows(),
            };
            serde_json::to_writer(&mut w, &doc)?;
            writeln!(w)?;
        }
        (Output::Neighbors(n), OutputFormat::Csv) => {
            if opts.header {
                writeln!(w, "query_id,neighbor_id,distance")?;
            }
            for q in 0..n.n_queries {
                for (&id, &d) in n.indices_row(q).iter().zip(n.distances_row(q)) {
                    writeln!(w, "{q},{id},{}", fmt_f64(d))?;
                }
            }
        }
        (Output::Neighbors(n), OutputFormat::Json) => {
            let records: Vec<NeighborRecord> = (0..n.n_queries)
                .map(|q| NeighborRecord {
                    query_id: q,
                    neighbors: n.indices_row(q).to_vec(),
                    distances: n.distances_row(q).to_vec(),
                })
                .collect();
            serde_json::to_writer(&mut w, &records)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_output(result: Output<'_>, path: impl AsRef<Path>, opts: WriteOptions) -> Result<()> {
    write_output_to(result, opts, BufWriter::new(File::create(path)?))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid number `{tok}`"),
    })
}

/// Reads a CSV distance matrix; a first line starting with `c0` is taken as
/// a header.
pub fn read_distances_csv<R: Read>(r: R) -> Result<DistanceOutput> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        if line.is_empty() || (i == 0 && line.starts_with("c0")) {
            continue;
        }
        rows.push(
            line.split(',')
                .map(|t| parse_f64(t, i + 1))
                .collect::<Result<_>>()?,
        );
    }
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::LengthMismatch("ragged CSV rows".into()));
    }
    let n = rows.len();
    checked(n, cols, rows.concat())
}

pub fn read_distances_json<R: Read>(r: R) -> Result<DistanceOutput> {
    let doc: DistanceJson = serde_json::from_reader(r)?;
    checked(doc.rows, doc.cols, doc.data.concat())
}

fn checked(rows: usize, cols: usize, data: Vec<f64>) -> Result<DistanceOutput> {
    if data.len() != rows * cols {
        return Err(Error::LengthMismatch(format!(
            "{} values for a {rows}x{cols} matrix",
            data.len()
        )));
    }
    Ok(DistanceOutput::from_vec(rows, cols, data))
}

/// Reads neighbor CSV rows back into a result; queries must appear in order
/// with the same `k` each.
pub fn read_neighbors_csv<R: Read>(r: R) -> Result<NeighborResult> {
    let mut records: Vec<NeighborRecord> = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        if line.is_empty() || (i == 0 && line.starts_with("query_id")) {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        let bad = || Error::Parse {
            line: i + 1,
            msg: "expected `query_id,neighbor_id,distance`".into(),
        };
        if parts.len() != 3 {
            return Err(bad());
        }
        let q: usize = parts[0].trim().parse().map_err(|_| bad())?;
        let id: usize = parts[1].trim().parse().map_err(|_| bad())?;
        let d = parse_f64(parts[2], i + 1)?;
        if records.last().map(|r| r.query_id) != Some(q) {
            records.push(NeighborRecord {
                query_id: q,
                neighbors: Vec::new(),
                distances: Vec::new(),
            });
        }
        let rec = records.last_mut().expect("just pushed");
        rec.neighbors.push(id);
        rec.distances.push(d);
    }
    neighbors_from_records(records)
}

pub fn read_neighbors_json<R: Read>(r: R) -> Result<NeighborResult> {
    neighbors_from_records(serde_json::from_reader(r)?)
}

fn neighbors_from_records(records: Vec<NeighborRecord>) -> Result<NeighborResult> {
    let k = records.first().map_or(0, |r| r.neighbors.len());
    let mut out = NeighborResult {
        n_queries: records.len(),
        k,
        distances: Vec::with_capacity(records.len() * k),
        indices: Vec::with_capacity(records.len() * k),
    };
    for (q, rec) in records.into_iter().enumerate() {
        if rec.query_id != q || rec.neighbors.len() != k || rec.distances.len() != k {
            return Err(Error::LengthMismatch(format!(
                "neighbor record {q} is out of order or has the wrong length"
            )));
        }
        out.indices.extend(rec.neighbors);
        out.distances.extend(rec.distances);
    }
    Ok(out)
}

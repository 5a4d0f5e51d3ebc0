//! Matrix Market in, distances out: writes a small matrix, reads it back,
//! and saves a Jaccard distance matrix as CSV and JSON.
//!
//!     cargo run --example matrix_market

use sparsedist::engine::ExecutionStrategy;
use sparsedist::io::{read_matrix_market, write_output, Output, OutputFormat, WriteOptions};
use sparsedist::metrics::{metric_registry, pairwise_distances, MetricParams};

const SETS: &str = "\
%%MatrixMarket matrix coordinate pattern general
% four sets over six items
4 6 9
1 1
1 2
1 3
2 2
2 3
3 4
3 5
4 1
4 6
";

fn main() -> sparsedist::error::Result<()> {
    let dir = std::env::temp_dir().join("sparsedist-mtx-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("sets.mtx");
    std::fs::write(&path, SETS)?;

    let m = read_matrix_market(&path)?;
    println!("read {}x{} with {} nonzeros", m.n_rows(), m.n_cols(), m.nnz());

    let spec = metric_registry("jaccard", MetricParams::default())?;
    let d = pairwise_distances(&m, &m, &spec, &ExecutionStrategy::auto())?;
    for i in 0..d.rows() {
        println!("{:?}", d.row(i));
    }

    for format in [OutputFormat::Csv, OutputFormat::Json] {
        let out = dir.join(if format == OutputFormat::Csv { "d.csv" } else { "d.json" });
        write_output(Output::Distances(&d), &out, WriteOptions { format, header: true })?;
        println!("--- {}", out.display());
        print!("{}", std::fs::read_to_string(&out)?);
    }
    Ok(())
}

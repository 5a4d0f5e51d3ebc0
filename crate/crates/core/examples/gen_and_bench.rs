//! Generate a skewed matrix and benchmark kNN queries against it,
//! printing the JSON report. Pass a row count to scale it up.
//!
//!     cargo run --release --example gen_and_bench -- 10000

use sparsedist::bench::{run_bench, InputSource, RunConfig};
use sparsedist::io::{DegreeDist, GenSpec, ValueDist};

fn main() -> sparsedist::error::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let spec = GenSpec {
        n_rows: n,
        n_cols: n,
        degrees: DegreeDist::Zipf { s: 1.1, max_deg: 500 },
        values: ValueDist::Uniform01,
        seed: 7,
    };
    let mut cfg = RunConfig::new(InputSource::Generated(spec), "manhattan");
    cfg.query_rows = Some(200.min(n));
    cfg.repeat = 2;

    let report = run_bench(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    for r in &report.runs {
        eprintln!("{:<6} {:.3}s", r.strategy, r.best_seconds);
    }
    eprintln!("checksums agree: {}", report.checksums_agree());
    Ok(())
}

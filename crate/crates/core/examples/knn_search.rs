//! Cosine nearest neighbors over TF-IDF-like document vectors with skewed
//! document lengths.
//!
//!     cargo run --release --example knn_search

use sparsedist::engine::ExecutionStrategy;
use sparsedist::io::{generate, DegreeDist, GenSpec, ValueDist};
use sparsedist::knn::kneighbors_with_stats;
use sparsedist::metrics::{metric_registry, MetricParams};
use sparsedist::sparse::degree_stats;

fn main() -> sparsedist::error::Result<()> {
    let docs = generate(&GenSpec {
        n_rows: 3000,
        n_cols: 5000,
        degrees: DegreeDist::Zipf { s: 1.1, max_deg: 400 },
        values: ValueDist::TfIdf,
        seed: 42,
    })?;
    let stats = degree_stats(&docs);
    println!(
        "{} docs, {} terms, {} nonzeros, length min/mean/max {}/{:.1}/{}",
        docs.n_rows(),
        docs.n_cols(),
        docs.nnz(),
        stats.min,
        stats.mean,
        stats.max
    );

    let queries = docs.slice_rows(0..5);
    let spec = metric_registry("cosine", MetricParams::default())?;
    let (hits, run) = kneighbors_with_stats(&docs, &queries, 4, &spec, &ExecutionStrategy::auto(), 256)?;
    for q in 0..hits.n_queries {
        let pairs: Vec<String> = hits
            .indices_row(q)
            .iter()
            .zip(hits.distances_row(q))
            .map(|(i, d)| format!("{i}:{d:.3}"))
            .collect();
        println!("query {q}: {}", pairs.join("  "));
    }
    println!(
        "norms {:.4}s, pass1 {:.4}s, expansion {:.4}s, top-k {:.4}s",
        run.phases.norms, run.phases.pass1, run.phases.expansion, run.topk_seconds
    );
    Ok(())
}

//! Every supported distance on the same pair of rows, next to the dense
//! reference formula.
//!
//!     cargo run --example metric_catalog

use sparsedist::engine::ExecutionStrategy;
use sparsedist::metrics::{pairwise_distances, Metric, MetricParams, MetricSpec};
use sparsedist::oracle::oracle_distance;
use sparsedist::sparse::CsrMatrix;

fn main() -> sparsedist::error::Result<()> {
    let x = [0.2, 0.0, 0.5, 0.3, 0.0, 0.0];
    let y = [0.1, 0.4, 0.4, 0.0, 0.0, 0.1];
    let xb = [1.0, 0.0, 1.0, 1.0, 0.0, 0.0];
    let yb = [1.0, 1.0, 1.0, 0.0, 0.0, 1.0];
    // KL needs y > 0 wherever x > 0.
    let ykl = [0.1, 0.4, 0.4, 0.05, 0.0, 0.05];

    println!("{:<14} {:>8} {:>12} {:>12}", "metric", "passes", "engine", "reference");
    for metric in Metric::ALL {
        let (a, b): (&[f64], &[f64]) = match metric {
            m if m.expects_binary() => (&xb, &yb),
            Metric::Kl => (&x, &ykl),
            _ => (&x, &y),
        };
        let p = (metric == Metric::Minkowski).then_some(3.0);
        let spec = MetricSpec::new(metric, MetricParams { p, ..Default::default() })?;
        let am = CsrMatrix::from_dense_rows(6, &[a])?;
        let bm = CsrMatrix::from_dense_rows(6, &[b])?;
        let d = pairwise_distances(&am, &bm, &spec, &ExecutionStrategy::auto())?;
        let want = oracle_distance(a, b, metric.name(), p)?;
        println!(
            "{:<14} {:>8} {:>12.6} {:>12.6}",
            metric.name(),
            spec.passes,
            d.get(0, 0),
            want
        );
    }
    Ok(())
}

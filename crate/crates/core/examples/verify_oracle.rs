//! Randomized comparison of every metric against its dense reference
//! formula, across all strategies.
//!
//!     cargo run --release --example verify_oracle

use sparsedist::metrics::{Metric, MetricParams};
use sparsedist::verify::{verify_metric, InstanceBounds};

fn main() -> sparsedist::error::Result<()> {
    let bounds = InstanceBounds::default();
    let mut failed = 0;
    for metric in Metric::ALL {
        let p = (metric == Metric::Minkowski).then_some(1.5);
        let r = verify_metric(metric, MetricParams { p, ..Default::default() }, 20, &bounds, 9)?;
        println!(
            "{} {:<14} {:>6} cells  max err {:.1e}",
            if r.passed() { "PASS" } else { "FAIL" },
            r.metric,
            r.cells,
            r.max_abs_err
        );
        failed += usize::from(!r.passed());
    }
    if failed > 0 {
        std::process::exit(3);
    }
    Ok(())
}

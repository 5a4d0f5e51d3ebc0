//! The three execution strategies side by side: same distances, different
//! workspace. A hash table smaller than the longest row forces rows to be
//! split into chunks.
//!
//!     cargo run --release --example strategies

use std::time::Instant;

use sparsedist::engine::{plan_chunks, ExecutionStrategy};
use sparsedist::io::{generate, DegreeDist, GenSpec, ValueDist};
use sparsedist::metrics::{compute_distances, metric_registry, MetricParams};

fn main() -> sparsedist::error::Result<()> {
    let x = generate(&GenSpec {
        n_rows: 2000,
        n_cols: 4000,
        degrees: DegreeDist::Zipf { s: 1.1, max_deg: 300 },
        values: ValueDist::Uniform01,
        seed: 3,
    })?;
    let queries = x.slice_rows(0..200);
    let spec = metric_registry("manhattan", MetricParams::default())?;

    let small = ExecutionStrategy::hash(64);
    let longest = x.max_degree();
    println!(
        "longest row has {longest} nonzeros; a 64-slot table at load 0.5 splits it into {} chunks",
        plan_chunks(longest, &small).len()
    );

    let mut reference = None;
    for strat in [
        ExecutionStrategy::naive(),
        ExecutionStrategy::dense(),
        ExecutionStrategy::hash_auto_capacity(),
        small,
    ] {
        let t = Instant::now();
        let run = compute_distances(&queries, &x, &spec, &strat)?;
        let secs = t.elapsed().as_secs_f64();
        let diff = reference
            .as_ref()
            .map_or(0.0, |r: &sparsedist::output::DistanceOutput| r.max_abs_diff(&run.distances));
        let w = &run.workspace;
        println!(
            "{:<6} {:>7.3}s  slots {:>5}  peak occupancy {:>5.1}%  staged {:>7}  max diff {diff:.1e}",
            strat.kind.to_string(),
            secs,
            w.accumulator_slots,
            100.0 * w.peak_occupancy(),
            w.workspace_elements,
        );
        reference.get_or_insert(run.distances);
    }
    Ok(())
}

//! Why Manhattan needs two passes.
//!
//! With a = [1, 0, 1] and b = [0, 1, 0] the rows share no column. Streaming
//! only b's nonzeros sees column 1 and misses columns 0 and 2, giving 1.
//! The second pass streams a's nonzeros that b lacks and recovers the
//! missing 2.
//!
//!     cargo run --example two_pass_manhattan

use sparsedist::engine::{pairwise_spmv_pass1, pairwise_spmv_pass2, ExecutionStrategy};
use sparsedist::metrics::{metric_registry, pairwise_distances, MetricParams};
use sparsedist::output::DistanceOutput;
use sparsedist::semiring::{ProductOp, Semiring};
use sparsedist::sparse::CsrMatrix;

fn main() -> sparsedist::error::Result<()> {
    let a = CsrMatrix::from_dense_rows(3, &[[1.0, 0.0, 1.0]])?;
    let b = CsrMatrix::from_dense_rows(3, &[[0.0, 1.0, 0.0]])?;
    let manhattan = Semiring::namm_sum(ProductOp::AbsDiff);
    let strat = ExecutionStrategy::dense();

    let mut out = DistanceOutput::filled(1, 1, 0.0);
    pairwise_spmv_pass1(&a, &b, &manhattan, &strat, &mut out)?;
    println!("after pass 1: {}", out.get(0, 0));

    pairwise_spmv_pass2(&a, &b, &manhattan, &strat, &mut out)?;
    println!("after pass 2: {}", out.get(0, 0));

    // A plain dot-product style kernel over the intersection sees nothing.
    let mut intersect = Semiring::namm_sum(ProductOp::AbsDiff);
    intersect.annihilating = true;
    let mut out = DistanceOutput::filled(1, 1, 0.0);
    pairwise_spmv_pass1(&a, &b, &intersect, &strat, &mut out)?;
    println!("intersection only: {}", out.get(0, 0));

    let spec = metric_registry("manhattan", MetricParams::default())?;
    let d = pairwise_distances(&a, &b, &spec, &ExecutionStrategy::auto())?;
    println!("registry manhattan ({} passes): {}", spec.passes, d.get(0, 0));
    Ok(())
}

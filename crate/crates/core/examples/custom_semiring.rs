//! Plugging a user-defined product into the engine.
//!
//! Squared difference is non-annihilating (x ⊗ 0 = x²), so the engine runs
//! both passes. The result is the squared Euclidean distance, computed
//! over the union of nonzero columns without any expansion trick.
//!
//!     cargo run --example custom_semiring

use std::sync::Arc;

use sparsedist::engine::{pairwise_generalized, ExecutionStrategy};
use sparsedist::oracle::{densify, oracle_semiring_dense};
use sparsedist::semiring::{ProductOp, Semiring};
use sparsedist::sparse::CsrMatrix;

fn main() -> sparsedist::error::Result<()> {
    let sq = Semiring::namm_sum(ProductOp::Custom(Arc::new(|x: f64, y: f64| (x - y) * (x - y))));

    let a = CsrMatrix::from_dense_rows(4, &[[1.0, 0.0, 2.0, 0.0], [0.0, 3.0, 0.0, 0.0]])?;
    let b = CsrMatrix::from_dense_rows(4, &[[0.0, 1.0, 2.0, 0.0], [0.0, 0.0, 0.0, 0.0], [1.0, 3.0, 0.0, 5.0]])?;

    let (d, report) = pairwise_generalized(&a, &b, &sq, &ExecutionStrategy::auto())?;
    println!("passes: {}", report.passes);
    let (da, db) = (densify(&a)?, densify(&b)?);
    for i in 0..d.rows() {
        for j in 0..d.cols() {
            let want = oracle_semiring_dense(da.row(i), db.row(j), |x, y| (x - y) * (x - y), |s, v| s + v, 0.0);
            println!("d({i}, {j}) = {:>4}   dense fold {want:>4}", d.get(i, j));
        }
    }
    Ok(())
}

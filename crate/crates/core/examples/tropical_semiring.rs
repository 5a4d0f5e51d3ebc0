//! Shortest two-hop paths with the min-plus semiring.
//!
//! Row i of `out` holds edge weights from node i to hub nodes, row j of
//! `into` holds weights from node j to the same hubs. The min-plus product
//! gives the cheapest route i -> hub -> j. Missing entries are missing
//! edges.
//!
//!     cargo run --example tropical_semiring

use sparsedist::engine::{pairwise_generalized, ExecutionStrategy};
use sparsedist::oracle::{densify, oracle_min_plus};
use sparsedist::semiring::Semiring;
use sparsedist::sparse::CsrMatrix;

fn main() -> sparsedist::error::Result<()> {
    // 4 nodes, 3 hubs.
    let out = CsrMatrix::from_triplets(4, 3, [(0, 0, 2.0), (0, 1, 7.0), (1, 1, 1.0), (2, 2, 4.0)])?;
    let into = CsrMatrix::from_triplets(4, 3, [(0, 1, 3.0), (1, 0, 1.0), (2, 2, 0.5), (3, 0, 6.0), (3, 1, 1.0)])?;

    let (paths, report) =
        pairwise_generalized(&out, &into, &Semiring::tropical_min_plus(), &ExecutionStrategy::auto())?;
    println!("{} pass(es), strategy {:?}", report.passes, report.strategy);
    for i in 0..paths.rows() {
        let row: Vec<String> = paths.row(i).iter().map(|v| format!("{v:>5}")).collect();
        println!("node {i}: {}", row.join(" "));
    }

    let brute = oracle_min_plus(&densify(&out)?, &densify(&into)?);
    assert_eq!(paths.as_slice(), brute.as_slice());
    println!("matches brute force");
    Ok(())
}

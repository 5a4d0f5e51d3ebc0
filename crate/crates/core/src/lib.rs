//! Pairwise distances and brute-force k-nearest neighbors over sparse
//! matrices, computed with a semiring-generalized sparse product.
//!
//! A distance is described by a [`metrics::MetricSpec`]: a
//! [`semiring::Semiring`] evaluated by the [`engine`] over the nonzero
//! columns of each row pair, optionally followed by an expansion that
//! combines dot products with row norms. Semirings whose product does not
//! annihilate on zero (Manhattan, Canberra, ...) are evaluated over the
//! union of nonzero columns in two passes.
//!
//! ```
//! use sparsedist::engine::ExecutionStrategy;
//! use sparsedist::metrics::{metric_registry, pairwise_distances, MetricParams};
//! use sparsedist::sparse::CsrMatrix;
//!
//! let a = CsrMatrix::from_dense_rows(3, &[[1.0, 0.0, 1.0]])?;
//! let b = CsrMatrix::from_dense_rows(3, &[[0.0, 1.0, 0.0]])?;
//! let spec = metric_registry("manhattan", MetricParams::default())?;
//! let d = pairwise_distances(&a, &b, &spec, &ExecutionStrategy::auto())?;
//! assert_eq!(d.get(0, 0), 3.0);
//! # Ok::<(), sparsedist::error::Error>(())
//! ```
//!
//! The `examples/` directory walks through each piece:
//!
//! | example | shows |
//! |---|---|
//! | `two_pass_manhattan` | why non-annihilating products need a second pass |
//! | `metric_catalog` | every metric next to its dense reference formula |
//! | `tropical_semiring` | min-plus shortest paths through the same engine |
//! | `custom_semiring` | a user-supplied product closure |
//! | `strategies` | naive, dense and hash execution with workspace reports |
//! | `knn_search` | cosine kNN over TF-IDF-like vectors |
//! | `matrix_market` | reading `.mtx` input and writing CSV/JSON output |
//! | `gen_and_bench` | synthetic skewed data and a JSON benchmark report |
//! | `verify_oracle` | randomized comparison against the dense oracle |

pub mod bench;
pub mod engine;
pub mod error;
pub mod io;
pub mod knn;
pub mod metrics;
pub mod oracle;
pub mod output;
pub mod semiring;
pub mod sparse;
pub mod verify;

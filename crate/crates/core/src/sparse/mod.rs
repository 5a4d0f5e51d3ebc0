//! Sparse containers: canonical CSR, its COO view, row norms and degree
//! statistics.

mod coo;
mod csr;
mod norms;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use coo::{coo_to_csr, csr_to_coo, expand_row_ids, CooMatrix};
pub use csr::{validate_and_canonicalize, CsrMatrix, RawCsr};
pub use norms::{row_norms, NormKind, NormVector};

/// Summary of the per-row nonzero counts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    /// degree -> number of rows with that degree
    pub histogram: BTreeMap<usize, usize>,
}

pub fn degree_stats(m: &CsrMatrix) -> DegreeStats {
    if m.n_rows() == 0 {
        return DegreeStats::default();
    }
    let mut histogram = BTreeMap::new();
    let mut min = usize::MAX;
    let mut max = 0;
    for w in m.indptr().windows(2) {
        let d = w[1] - w[0];
        min = min.min(d);
        max = max.max(d);
        *histogram.entry(d).or_insert(0) += 1;
    }
    DegreeStats {
        min,
        max,
        mean: m.nnz() as f64 / m.n_rows() as f64,
        histogram,
    }
}

use super::CsrMatrix;

/// Coordinate-format view of a canonical CSR matrix.
///
/// Entries are sorted by `(row, col)` with no duplicates, which is what the
/// load-balanced engine relies on to run segmented reductions over rows.
#[derive(Clone, Debug, PartialEq)]
pub struct CooMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<f64>,
}

/// Expands `indptr` into an explicit row id per nonzero.
pub fn expand_row_ids(m: &CsrMatrix) -> Vec<usize> {
    let mut rows = Vec::with_capacity(m.nnz());
    for (r, w) in m.indptr().windows(2).enumerate() {
        rows.extend(std::iter::repeat_n(r, w[1] - w[0]));
    }
    rows
}

pub fn csr_to_coo(m: &CsrMatrix) -> CooMatrix {
    CooMatrix {
        n_rows: m.n_rows(),
        n_cols: m.n_cols(),
        rows: expand_row_ids(m),
        cols: m.indices().to_vec(),
        values: m.values().to_vec(),
    }
}

/// Compresses a sorted COO matrix back into CSR.
///
/// The input must satisfy the COO invariants (sorted, no duplicates, no
/// zeros); this holds for anything produced by [`csr_to_coo`].
pub fn coo_to_csr(m: &CooMatrix) -> CsrMatrix {
    let mut indptr = vec![0usize; m.n_rows + 1];
    for &r in &m.rows {
        indptr[r + 1] += 1;
    }
    for r in 0..m.n_rows {
        indptr[r + 1] += indptr[r];
    }
    CsrMatrix::from_canonical_parts(
        m.n_rows,
        m.n_cols,
        indptr,
        m.cols.clone(),
        m.values.clone(),
    )
}

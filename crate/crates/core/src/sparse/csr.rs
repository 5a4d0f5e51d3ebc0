use std::ops::Range;

use crate::error::{Error, Result};

/// Uncanonicalized CSR triple as it arrives from callers or files.
///
/// Offsets and column ids are signed so that malformed input can be
/// reported precisely instead of wrapping.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawCsr {
    pub n_rows: usize,
    pub n_cols: usize,
    pub indptr: Vec<i64>,
    pub indices: Vec<i64>,
    pub values: Vec<f64>,
}

/// Compressed sparse row matrix of `f64` values.
///
/// A `CsrMatrix` is always canonical: column ids are strictly increasing
/// within each row, every id is below `n_cols`, and no explicit zeros are
/// stored. The only ways to build one go through
/// [`validate_and_canonicalize`] or trusted internal constructors that
/// uphold the same invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

/// Validates a raw CSR triple and returns its canonical form.
///
/// Rows are sorted by column, duplicate columns are summed and stored zeros
/// (including zeros produced by summation) are dropped.
pub fn validate_and_canonicalize(raw: RawCsr) -> Result<CsrMatrix> {
    let RawCsr {
        n_rows,
        n_cols,
        indptr,
        indices,
        values,
    } = raw;

    if indptr.len() != n_rows + 1 {
        return Err(Error::LengthMismatch(format!(
            "indptr has {} entries, expected n_rows + 1 = {}",
            indptr.len(),
            n_rows + 1
        )));
    }
    if indices.len() != values.len() {
        return Err(Error::LengthMismatch(format!(
            "{} column indices but {} values",
            indices.len(),
            values.len()
        )));
    }
    for (row, &off) in indptr.iter().enumerate() {
        if off < 0 {
            return Err(Error::NegativeOffset {
                row: row.min(n_rows.saturating_sub(1)),
                offset: off,
            });
        }
    }
    if indptr[0] != 0 {
        return Err(Error::LengthMismatch(format!(
            "indptr[0] must be 0, found {}",
            indptr[0]
        )));
    }
    for row in 0..n_rows {
        if indptr[row] > indptr[row + 1] {
            return Err(Error::NonMonotonicIndptr {
                row,
                start: indptr[row],
                end: indptr[row + 1],
            });
        }
    }
    if indptr[n_rows] as usize != indices.len() {
        return Err(Error::LengthMismatch(format!(
            "indptr[n_rows] = {} but {} nonzeros supplied",
            indptr[n_rows],
            indices.len()
        )));
    }

    let mut out_indptr = Vec::with_capacity(n_rows + 1);
    let mut out_indices = Vec::with_capacity(indices.len());
    let mut out_values = Vec::with_capacity(values.len());
    out_indptr.push(0);

    let mut scratch: Vec<(usize, f64)> = Vec::new();
    for row in 0..n_rows {
        let span = indptr[row] as usize..indptr[row + 1] as usize;
        scratch.clear();
        for pos in span {
            let col = indices[pos];
            if col < 0 || col as usize >= n_cols {
                return Err(Error::IndexOutOfBounds { row, col, n_cols });
            }
            scratch.push((col as usize, values[pos]));
        }
        scratch.sort_by_key(|&(c, _)| c);

        let mut k = 0;
        while k < scratch.len() {
            let col = scratch[k].0;
            let mut sum = scratch[k].1;
            k += 1;
            while k < scratch.len() && scratch[k].0 == col {
                sum += scratch[k].1;
                k += 1;
            }
            if sum != 0.0 {
                out_indices.push(col);
                out_values.push(sum);
            }
        }
        out_indptr.push(out_indices.len());
    }

    Ok(CsrMatrix {
        n_rows,
        n_cols,
        indptr: out_indptr,
        indices: out_indices,
        values: out_values,
    })
}

impl CsrMatrix {
    /// Builds a matrix from unsigned parts, canonicalizing on the way.
    pub fn try_from_parts(
        n_rows: usize,
        n_cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        validate_and_canonicalize(RawCsr {
            n_rows,
            n_cols,
            indptr: indptr.into_iter().map(|v| v as i64).collect(),
            indices: indices.into_iter().map(|v| v as i64).collect(),
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets in any order.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut triplets: Vec<_> = triplets.into_iter().collect();
        for &(r, c, _) in &triplets {
            if r >= n_rows {
                return Err(Error::LengthMismatch(format!(
                    "row {r} out of bounds for {n_rows} rows"
                )));
            }
            if c >= n_cols {
                return Err(Error::IndexOutOfBounds {
                    row: r,
                    col: c as i64,
                    n_cols,
                });
            }
        }
        triplets.sort_by_key(|&(r, _, _)| r);
        let mut indptr = vec![0i64; n_rows + 1];
        for &(r, _, _) in &triplets {
            indptr[r + 1] += 1;
        }
        for r in 0..n_rows {
            indptr[r + 1] += indptr[r];
        }
        validate_and_canonicalize(RawCsr {
            n_rows,
            n_cols,
            indptr,
            indices: triplets.iter().map(|&(_, c, _)| c as i64).collect(),
            values: triplets.iter().map(|&(_, _, v)| v).collect(),
        })
    }

    /// Builds a matrix from dense rows, dropping zeros.
    pub fn from_dense_rows<R: AsRef<[f64]>>(n_cols: usize, rows: &[R]) -> Result<Self> {
        let mut triplets = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::LengthMismatch(format!(
                    "row {r} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            triplets.extend(
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(c, &v)| (r, c, v)),
            );
        }
        Self::from_triplets(rows.len(), n_cols, triplets)
    }

    /// An `n_rows x n_cols` matrix with no stored entries.
    pub fn empty(n_rows: usize, n_cols: usize) -> Self {
        CsrMatrix {
            n_rows,
            n_cols,
            indptr: vec![0; n_rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Trusted constructor for parts already known to be canonical.
    pub(crate) fn from_canonical_parts(
        n_rows: usize,
        n_cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(indptr.len(), n_rows + 1);
        debug_assert_eq!(indptr[n_rows], indices.len());
        debug_assert!(values.iter().all(|&v| v != 0.0));
        CsrMatrix {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row_range(&self, row: usize) -> Range<usize> {
        self.indptr[row]..self.indptr[row + 1]
    }

    /// Column ids and values of one row.
    #[inline]
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let span = self.row_range(row);
        (&self.indices[span.clone()], &self.values[span])
    }

    #[inline]
    pub fn row_degree(&self, row: usize) -> usize {
        self.indptr[row + 1] - self.indptr[row]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n_rows)
            .map(|r| self.row_degree(r))
            .max()
            .unwrap_or(0)
    }

    /// Value stored at `(row, col)`, or zero.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (cols, vals) = self.row(row);
        match cols.binary_search(&col) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// Copies a contiguous block of rows into a new matrix.
    pub fn slice_rows(&self, rows: Range<usize>) -> CsrMatrix {
        assert!(rows.start <= rows.end && rows.end <= self.n_rows);
        let lo = self.indptr[rows.start];
        let hi = self.indptr[rows.end];
        let indptr = self.indptr[rows.start..=rows.end]
            .iter()
            .map(|&p| p - lo)
            .collect();
        CsrMatrix {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            indptr,
            indices: self.indices[lo..hi].to_vec(),
            values: self.values[lo..hi].to_vec(),
        }
    }

    /// Applies `f` to every stored value, dropping entries mapped to zero.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CsrMatrix {
        let mut indptr = Vec::with_capacity(self.n_rows + 1);
        let mut indices = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        indptr.push(0);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let mapped = f(v);
                if mapped != 0.0 {
                    indices.push(c);
                    values.push(mapped);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix::from_canonical_parts(self.n_rows, self.n_cols, indptr, indices, values)
    }

    pub fn into_raw(self) -> RawCsr {
        RawCsr {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            indptr: self.indptr.into_iter().map(|v| v as i64).collect(),
            indices: self.indices.into_iter().map(|v| v as i64).collect(),
            values: self.values,
        }
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let span = self.row_range(r);
            self.indices[span.clone()]
                .iter()
                .zip(&self.values[span])
                .map(move |(&c, &v)| (r, c, v))
        })
    }
}

//! Load-balanced hybrid CSR+COO scan.
//!
//! One row of the "resident" matrix is loaded into a per-worker
//! accumulator (dense array or hash table). The worker then streams every
//! nonzero of the other matrix in COO order and performs a segmented
//! reduction keyed by the streamed row id. Each output cell belongs to
//! exactly one worker and is reduced in a fixed order, so results do not
//! depend on the number of threads.

use std::ops::Range;

use rayon::prelude::*;

use super::hash::HashAccumulator;
use crate::sparse::CsrMatrix;

/// Nonzeros of the streamed matrix processed per chunk.
pub(crate) const NZ_PER_CHUNK: usize = 4096;

pub(crate) trait RowAccumulator: Send {
    fn load(&mut self, cols: &[usize], vals: &[f64]);
    fn unload(&mut self, cols: &[usize]);
    fn lookup(&self, col: usize) -> Option<f64>;
    fn slots(&self) -> usize;
}

/// Dense accumulator of `n_cols` values. Canonical rows never store zeros,
/// so a zero slot means "absent".
pub(crate) struct DenseAccumulator {
    values: Vec<f64>,
}

impl DenseAccumulator {
    pub(crate) fn new(n_cols: usize) -> Self {
        DenseAccumulator {
            values: vec![0.0; n_cols],
        }
    }
}

impl RowAccumulator for DenseAccumulator {
    #[inline]
    fn load(&mut self, cols: &[usize], vals: &[f64]) {
        for (&c, &v) in cols.iter().zip(vals) {
            self.values[c] = v;
        }
    }

    #[inline]
    fn unload(&mut self, cols: &[usize]) {
        for &c in cols {
            self.values[c] = 0.0;
        }
    }

    #[inline(always)]
    fn lookup(&self, col: usize) -> Option<f64> {
        let v = self.values[col];
        if v != 0.0 {
            Some(v)
        } else {
            None
        }
    }

    fn slots(&self) -> usize {
        self.values.len()
    }
}

impl RowAccumulator for HashAccumulator {
    #[inline]
    fn load(&mut self, cols: &[usize], vals: &[f64]) {
        self.build(cols, vals);
    }

    #[inline]
    fn unload(&mut self, _cols: &[usize]) {
        self.clear();
    }

    #[inline(always)]
    fn lookup(&self, col: usize) -> Option<f64> {
        self.probe(col)
    }

    fn slots(&self) -> usize {
        self.capacity()
    }
}

/// The streamed side in COO form: `rows` is the staged row-id array, the
/// columns and values are borrowed straight from the CSR arrays.
pub(crate) struct Stream<'a> {
    pub rows: &'a [usize],
    pub cols: &'a [usize],
    pub vals: &'a [f64],
}

impl<'a> Stream<'a> {
    pub(crate) fn new(m: &'a CsrMatrix, rows: &'a [usize]) -> Self {
        debug_assert_eq!(rows.len(), m.nnz());
        Stream {
            rows,
            cols: m.indices(),
            vals: m.values(),
        }
    }

    fn n_chunks(&self) -> usize {
        self.rows.len().div_ceil(NZ_PER_CHUNK)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct PassStats {
    pub peak_entries: usize,
    pub chunks: usize,
    pub slots: usize,
}

impl PassStats {
    fn merge(self, other: PassStats) -> PassStats {
        PassStats {
            peak_entries: self.peak_entries.max(other.peak_entries),
            chunks: self.chunks + other.chunks,
            slots: self.slots.max(other.slots),
        }
    }
}

/// Streams every nonzero whose column lies in `[lo, hi)` and reduces
/// `contrib(resident_value, streamed_value)` into `out_row[streamed_row]`.
#[inline(always)]
fn scan<A, F, R>(
    acc: &A,
    cols: Range<usize>,
    stream: &Stream<'_>,
    out_row: &mut [f64],
    reduce: &R,
    identity: f64,
    contrib: &F,
) where
    A: RowAccumulator,
    F: Fn(Option<f64>, f64) -> Option<f64>,
    R: Fn(f64, f64) -> f64,
{
    let full = cols.start == 0 && cols.end == usize::MAX;
    let nnz = stream.rows.len();
    let mut cur = usize::MAX;
    let mut partial = identity;
    let mut start = 0;
    while start < nnz {
        let end = (start + NZ_PER_CHUNK).min(nnz);
        let rows = &stream.rows[start..end];
        let ccols = &stream.cols[start..end];
        let vals = &stream.vals[start..end];
        for t in 0..rows.len() {
            let c = ccols[t];
            if !full && !cols.contains(&c) {
                continue;
            }
            let Some(v) = contrib(acc.lookup(c), vals[t]) else {
                continue;
            };
            let r = rows[t];
            if r != cur {
                if cur != usize::MAX {
                    out_row[cur] = reduce(out_row[cur], partial);
                }
                cur = r;
                partial = identity;
            }
            partial = reduce(partial, v);
        }
        start = end;
    }
    if cur != usize::MAX {
        out_row[cur] = reduce(out_row[cur], partial);
    }
}

/// Column window covered by chunk `k` of a row: from its first column (or 0
/// for the first chunk) up to the first column of the next chunk.
fn chunk_columns(cols: &[usize], chunks: &[Range<usize>], k: usize) -> Range<usize> {
    let lo = if k == 0 { 0 } else { cols[chunks[k].start] };
    let hi = if k + 1 == chunks.len() {
        usize::MAX
    } else {
        cols[chunks[k + 1].start]
    };
    lo..hi
}

/// Runs one balanced pass. `out` is `resident.n_rows() x streamed.n_rows()`
/// row-major. `skip_empty` lets annihilating passes skip resident rows with
/// no nonzeros.
#[allow(clippy::too_many_arguments)]
pub(crate) fn balanced_pass<A, MA, CH, F, R>(
    resident: &CsrMatrix,
    stream: &Stream<'_>,
    out: &mut [f64],
    n_streamed_rows: usize,
    make_acc: MA,
    plan: CH,
    reduce: &R,
    identity: f64,
    contrib: &F,
    skip_empty: bool,
) -> PassStats
where
    A: RowAccumulator,
    MA: Fn() -> A + Sync + Send,
    CH: Fn(usize) -> Vec<Range<usize>> + Sync + Send,
    F: Fn(Option<f64>, f64) -> Option<f64> + Sync,
    R: Fn(f64, f64) -> f64 + Sync,
{
    if n_streamed_rows == 0 || resident.n_rows() == 0 {
        return PassStats::default();
    }
    let stream_chunks = stream.n_chunks();
    out.par_chunks_mut(n_streamed_rows)
        .enumerate()
        .map_init(&make_acc, |acc, (i, out_row)| {
            let (cols, vals) = resident.row(i);
            let mut stats = PassStats {
                slots: acc.slots(),
                ..PassStats::default()
            };
            if skip_empty && cols.is_empty() {
                return stats;
            }
            let chunks = plan(cols.len());
            for k in 0..chunks.len() {
                let span = chunks[k].clone();
                acc.load(&cols[span.clone()], &vals[span.clone()]);
                stats.peak_entries = stats.peak_entries.max(span.len());
                stats.chunks += stream_chunks;
                scan(
                    acc,
                    chunk_columns(cols, &chunks, k),
                    stream,
                    out_row,
                    reduce,
                    identity,
                    contrib,
                );
                acc.unload(&cols[span]);
            }
            stats
        })
        .reduce(PassStats::default, PassStats::merge)
}

//! Brute-force batched k-nearest-neighbor search.

use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{ExecutionStrategy, WorkspaceReport};
use crate::error::{Error, Result};
use crate::metrics::{compute_distances, MetricSpec, PhaseTimings};
use crate::sparse::CsrMatrix;

/// Default cap on one batch's dense distance block.
pub const DEFAULT_MEMORY_BUDGET: usize = 256 << 20;

/// `k` nearest index rows for each query row, nearest first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborResult {
    pub n_queries: usize,
    pub k: usize,
    /// Row-major `n_queries x k`.
    pub distances: Vec<f64>,
    /// Row-major `n_queries x k`.
    pub indices: Vec<usize>,
}

impl NeighborResult {
    pub fn distances_row(&self, q: usize) -> &[f64] {
        &self.distances[q * self.k..(q + 1) * self.k]
    }

    pub fn indices_row(&self, q: usize) -> &[usize] {
        &self.indices[q * self.k..(q + 1) * self.k]
    }
}

/// How the query rows are split into sequential batches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchPlan {
    pub batch_rows: usize,
    pub n_batches: usize,
    /// Dense output elements materialized per batch.
    pub elements_per_batch: usize,
}

impl BatchPlan {
    pub fn new(n_queries: usize, n_index: usize, batch_rows: usize) -> Result<Self> {
        if batch_rows == 0 {
            return Err(Error::InvalidParam("batch_rows must be at least 1".into()));
        }
        let batch_rows = batch_rows.min(n_queries.max(1));
        Ok(BatchPlan {
            batch_rows,
            n_batches: n_queries.div_ceil(batch_rows),
            elements_per_batch: batch_rows * n_index,
        })
    }

    /// Largest batch whose `batch x n_index` f64 block fits `budget_bytes`.
    pub fn from_memory_budget(n_queries: usize, n_index: usize, budget_bytes: usize) -> Self {
        let per_row = n_index.max(1) * std::mem::size_of::<f64>();
        let rows = (budget_bytes / per_row).max(1);
        Self::new(n_queries, n_index, rows).expect("batch size is positive")
    }

    pub fn batches(&self, n_queries: usize) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        (0..self.n_batches).map(move |b| {
            let lo = b * self.batch_rows;
            lo..(lo + self.batch_rows).min(n_queries)
        })
    }
}

#[inline]
fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// The `k` smallest values of `row` in ascending order, ties broken by the
/// lower index.
pub fn select_topk(row: &[f64], k: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    if k > row.len() {
        return Err(Error::KTooLarge {
            k,
            available: row.len(),
        });
    }
    let mut pairs: Vec<(f64, usize)> = row.iter().copied().zip(0..).collect();
    if k == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if k < pairs.len() {
        pairs.select_nth_unstable_by(k - 1, by_distance_then_index);
        pairs.truncate(k);
    }
    pairs.sort_unstable_by(by_distance_then_index);
    Ok(pairs.into_iter().unzip())
}

/// Timing and accounting gathered over all batches.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct KnnStats {
    pub plan: Option<BatchPlan>,
    pub phases: PhaseTimings,
    pub topk_seconds: f64,
    pub workspace: WorkspaceReport,
}

/// Finds the `k` nearest rows of `index` for every row of `queries`.
///
/// Self matches are kept: querying a matrix against itself returns each
/// row as its own nearest neighbor under a true metric.
pub fn kneighbors(
    index: &CsrMatrix,
    queries: &CsrMatrix,
    k: usize,
    spec: &MetricSpec,
    strat: &ExecutionStrategy,
    batch_rows: usize,
) -> Result<NeighborResult> {
    kneighbors_with_stats(index, queries, k, spec, strat, batch_rows).map(|(r, _)| r)
}

pub fn kneighbors_with_stats(
    index: &CsrMatrix,
    queries: &CsrMatrix,
    k: usize,
    spec: &MetricSpec,
    strat: &ExecutionStrategy,
    batch_rows: usize,
) -> Result<(NeighborResult, KnnStats)> {
    if k > index.n_rows() {
        return Err(Error::KTooLarge {
            k,
            available: index.n_rows(),
        });
    }
    if index.n_cols() != queries.n_cols() {
        return Err(Error::DimensionMismatch {
            left: queries.n_cols(),
            right: index.n_cols(),
        });
    }
    let plan = BatchPlan::new(queries.n_rows(), index.n_rows(), batch_rows)?;
    let m = queries.n_rows();
    let mut distances = vec![0.0; m * k];
    let mut indices = vec![0usize; m * k];
    let mut stats = KnnStats::default();

    for batch in plan.batches(m) {
        let block = queries.slice_rows(batch.clone());
        let run = compute_distances(&block, index, spec, strat)?;
        stats.phases.norms += run.timings.norms;
        stats.phases.pass1 += run.timings.pass1;
        stats.phases.pass2 += run.timings.pass2;
        stats.phases.expansion += run.timings.expansion;
        stats.workspace = if stats.workspace.strategy.is_none() {
            run.workspace
        } else {
            let mut merged = stats.workspace.merge(&run.workspace);
            merged.passes = run.workspace.passes;
            merged
        };

        let t = Instant::now();
        if k > 0 {
            let lo = batch.start * k;
            let hi = batch.end * k;
            distances[lo..hi]
                .par_chunks_mut(k)
                .zip(indices[lo..hi].par_chunks_mut(k))
                .enumerate()
                .try_for_each(|(r, (dst_d, dst_i))| -> Result<()> {
                    let (d, i) = select_topk(run.distances.row(r), k)?;
                    dst_d.copy_from_slice(&d);
                    dst_i.copy_from_slice(&i);
                    Ok(())
                })?;
        }
        stats.topk_seconds += t.elapsed().as_secs_f64();
    }
    stats.plan = Some(plan);

    Ok((
        NeighborResult {
            n_queries: m,
            k,
            distances,
            indices,
        },
        stats,
    ))
}

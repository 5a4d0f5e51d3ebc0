use std::ops::Range;

use super::ExecutionStrategy;

/// Nonzero budget per hash chunk: `floor(max_load_factor * capacity)`, at
/// least one.
pub fn chunk_budget(capacity: usize, max_load_factor: f64) -> usize {
    ((capacity as f64 * max_load_factor).floor() as usize).max(1)
}

/// Splits a row of `row_degree` nonzeros into uniformly sized chunks that
/// each fit the hash accumulator's load budget.
///
/// Returned ranges are positions within the row. Sizes differ by at most
/// one and larger chunks come first. A row within budget yields a single
/// chunk; an empty row yields one empty chunk.
pub fn plan_chunks(row_degree: usize, strat: &ExecutionStrategy) -> Vec<Range<usize>> {
    let capacity = strat.accumulator_capacity.unwrap_or(row_degree.max(1) * 2);
    plan_chunks_with_budget(row_degree, chunk_budget(capacity, strat.max_load_factor))
}

#[allow(clippy::single_range_in_vec_init)]
pub(crate) fn plan_chunks_with_budget(row_degree: usize, budget: usize) -> Vec<Range<usize>> {
    if row_degree <= budget {
        return vec![0..row_degree];
    }
    let n_chunks = row_degree.div_ceil(budget);
    let base = row_degree / n_chunks;
    let extra = row_degree % n_chunks;
    let mut out = Vec::with_capacity(n_chunks);
    let mut start = 0;
    for c in 0..n_chunks {
        let len = base + usize::from(c < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}

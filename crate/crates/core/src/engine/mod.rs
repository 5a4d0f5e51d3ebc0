//! Generalized pairwise SpMV over a [`Semiring`].
//!
//! Every row of `A` is paired with every row of `B` and the semiring is
//! evaluated over their nonzero columns. Annihilating semirings only need
//! the column intersection and finish in one pass. Non-annihilating ones
//! need the full union, which is split into
//!
//! * pass 1: stream the nonzeros of `B_j`, looking up `A_i` (covers
//!   `a ∩ b` and `ā ∩ b`);
//! * pass 2: stream the nonzeros of `A_i` that are absent from `B_j`
//!   (covers `a ∩ b̄`).

mod balanced;
mod chunk;
mod hash;
mod naive;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::DistanceOutput;
use crate::semiring::{self, ProductOp, ReduceOp, Semiring};
use crate::sparse::{expand_row_ids, CsrMatrix};

use balanced::{balanced_pass, DenseAccumulator, PassStats, Stream};
pub use chunk::{chunk_budget, plan_chunks};
pub use hash::{murmur_fmix32, HashAccumulator, EMPTY_SLOT};

/// Auto selection uses the dense accumulator up to this many columns.
pub const DENSE_MAX_COLS: usize = 16_384;
/// Upper bound on the automatically chosen hash capacity.
pub const HASH_MAX_CAPACITY: usize = 16_384;
pub const DEFAULT_MAX_LOAD_FACTOR: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    /// Pick dense or hash from the input shape.
    Auto,
    /// One row pair per work item, merging sorted column lists.
    NaiveMerge,
    /// Load-balanced scan with a dense per-worker accumulator.
    BalancedDense,
    /// Load-balanced scan with a hash-table accumulator.
    BalancedHash,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Auto => "auto",
            StrategyKind::NaiveMerge => "naive",
            StrategyKind::BalancedDense => "dense",
            StrategyKind::BalancedHash => "hash",
        })
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(StrategyKind::Auto),
            "naive" | "naive-merge" => Ok(StrategyKind::NaiveMerge),
            "dense" | "balanced-dense" => Ok(StrategyKind::BalancedDense),
            "hash" | "balanced-hash" => Ok(StrategyKind::BalancedHash),
            other => Err(Error::InvalidParam(format!(
                "unknown strategy `{other}` (expected auto, naive, dense or hash)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionStrategy {
    pub kind: StrategyKind,
    /// Hash slots per worker. `None` derives it from the row degrees.
    pub accumulator_capacity: Option<usize>,
    pub max_load_factor: f64,
}

impl Default for ExecutionStrategy {
    fn default() -> Self {
        Self::auto()
    }
}

impl ExecutionStrategy {
    fn of(kind: StrategyKind) -> Self {
        ExecutionStrategy {
            kind,
            accumulator_capacity: None,
            max_load_factor: DEFAULT_MAX_LOAD_FACTOR,
        }
    }

    pub fn auto() -> Self {
        Self::of(StrategyKind::Auto)
    }

    pub fn naive() -> Self {
        Self::of(StrategyKind::NaiveMerge)
    }

    pub fn dense() -> Self {
        Self::of(StrategyKind::BalancedDense)
    }

    pub fn hash(capacity: usize) -> Self {
        ExecutionStrategy {
            accumulator_capacity: Some(capacity),
            ..Self::of(StrategyKind::BalancedHash)
        }
    }

    pub fn hash_auto_capacity() -> Self {
        Self::of(StrategyKind::BalancedHash)
    }

    pub fn from_kind(kind: StrategyKind) -> Self {
        Self::of(kind)
    }

    pub fn with_load_factor(mut self, load: f64) -> Self {
        self.max_load_factor = load;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.accumulator_capacity == Some(0) {
            return Err(Error::InvalidParam(
                "accumulator capacity must be at least 1".into(),
            ));
        }
        if !(self.max_load_factor > 0.0 && self.max_load_factor <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "max load factor {} must lie in (0, 1]",
                self.max_load_factor
            )));
        }
        Ok(())
    }

    /// Replaces `Auto` and missing capacities with concrete choices for
    /// this pair of inputs.
    pub fn resolve(&self, a: &CsrMatrix, b: &CsrMatrix) -> ExecutionStrategy {
        let max_degree = a.max_degree().max(b.max_degree());
        match self.kind {
            StrategyKind::Auto if a.n_cols() <= DENSE_MAX_COLS => ExecutionStrategy {
                kind: StrategyKind::BalancedDense,
                ..self.clone()
            },
            StrategyKind::Auto | StrategyKind::BalancedHash => ExecutionStrategy {
                kind: StrategyKind::BalancedHash,
                accumulator_capacity: Some(
                    self.accumulator_capacity
                        .unwrap_or_else(|| auto_hash_capacity(max_degree)),
                ),
                max_load_factor: self.max_load_factor,
            },
            _ => self.clone(),
        }
    }
}

/// Smallest power of two holding twice the degree, capped at
/// [`HASH_MAX_CAPACITY`]. Rows beyond the cap are chunked.
pub fn auto_hash_capacity(max_degree: usize) -> usize {
    (2 * max_degree).max(1).next_power_of_two().min(HASH_MAX_CAPACITY)
}

/// Memory accounting for one engine run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceReport {
    pub strategy: Option<StrategyKind>,
    pub passes: u8,
    /// Most entries resident in any one accumulator at a time.
    pub peak_accumulator_entries: usize,
    /// Slots allocated per worker accumulator (dense: `n_cols`, hash:
    /// capacity).
    pub accumulator_slots: usize,
    /// Staged COO row ids for the streamed side, largest over the passes.
    pub workspace_elements: usize,
    /// Accumulator loads times streamed chunks, or row pairs for the
    /// naive strategy.
    pub chunks_executed: usize,
}

impl WorkspaceReport {
    pub fn merge(&self, other: &WorkspaceReport) -> WorkspaceReport {
        WorkspaceReport {
            strategy: self.strategy.or(other.strategy),
            passes: self.passes + other.passes,
            peak_accumulator_entries: self
                .peak_accumulator_entries
                .max(other.peak_accumulator_entries),
            accumulator_slots: self.accumulator_slots.max(other.accumulator_slots),
            workspace_elements: self.workspace_elements.max(other.workspace_elements),
            chunks_executed: self.chunks_executed + other.chunks_executed,
        }
    }

    /// Peak accumulator occupancy as a fraction of its slots.
    pub fn peak_occupancy(&self) -> f64 {
        if self.accumulator_slots == 0 {
            0.0
        } else {
            self.peak_accumulator_entries as f64 / self.accumulator_slots as f64
        }
    }
}

/// Wall time of each engine pass in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PassTimings {
    pub pass1: f64,
    pub pass2: f64,
}

/// Binds `$p` and `$r` to monomorphic closures for the semiring's product
/// and reduce ops, then evaluates `$body`.
macro_rules! with_ops {
    ($s:expr, |$p:ident, $r:ident| $body:expr) => {{
        match &$s.reduce {
            ReduceOp::Sum => {
                let $r = |x: f64, y: f64| x + y;
                with_ops!(@product $s, $p, $body)
            }
            ReduceOp::Max => {
                let $r = |x: f64, y: f64| x.max(y);
                with_ops!(@product $s, $p, $body)
            }
            ReduceOp::Min => {
                let $r = |x: f64, y: f64| x.min(y);
                with_ops!(@product $s, $p, $body)
            }
            ReduceOp::Custom(f) => {
                let $r = |x: f64, y: f64| f(x, y);
                with_ops!(@product $s, $p, $body)
            }
        }
    }};
    (@product $s:expr, $p:ident, $body:expr) => {{
        match &$s.product {
            ProductOp::Mul => {
                let $p = |x: f64, y: f64| x * y;
                $body
            }
            ProductOp::Add => {
                let $p = |x: f64, y: f64| x + y;
                $body
            }
            ProductOp::AbsDiff => {
                let $p = semiring::abs_diff;
                $body
            }
            ProductOp::AbsDiffPow(e) => {
                let e = *e;
                let $p = move |x: f64, y: f64| semiring::abs_diff(x, y).powf(e);
                $body
            }
            ProductOp::Canberra => {
                let $p = semiring::canberra;
                $body
            }
            ProductOp::NotEqual => {
                let $p = semiring::not_equal;
                $body
            }
            ProductOp::JensenShannon => {
                let $p = semiring::jensen_shannon;
                $body
            }
            ProductOp::KlTerm => {
                let $p = semiring::kl_term;
                $body
            }
            ProductOp::SqrtMul => {
                let $p = |x: f64, y: f64| x.sqrt() * y.sqrt();
                $body
            }
            ProductOp::BothNonzero => {
                let $p = semiring::both_nonzero;
                $body
            }
            ProductOp::Custom(f) => {
                let $p = |x: f64, y: f64| f(x, y);
                $body
            }
        }
    }};
}

fn check_dims(a: &CsrMatrix, b: &CsrMatrix) -> Result<()> {
    if a.n_cols() != b.n_cols() {
        return Err(Error::DimensionMismatch {
            left: a.n_cols(),
            right: b.n_cols(),
        });
    }
    Ok(())
}

fn check_out(out: &DistanceOutput, rows: usize, cols: usize) -> Result<()> {
    if out.rows() != rows || out.cols() != cols {
        return Err(Error::LengthMismatch(format!(
            "output is {}x{}, expected {rows}x{cols}",
            out.rows(),
            out.cols()
        )));
    }
    Ok(())
}

/// Runs `contrib` over the resident/streamed pairing chosen by `strat`.
/// `resident` is loaded row by row; `streamed` is scanned in COO order and
/// `out` is `resident.n_rows() x streamed.n_rows()`.
#[allow(clippy::too_many_arguments, clippy::single_range_in_vec_init)]
fn balanced_run<F, R>(
    resident: &CsrMatrix,
    streamed: &CsrMatrix,
    strat: &ExecutionStrategy,
    out: &mut [f64],
    reduce: &R,
    identity: f64,
    contrib: &F,
    skip_empty: bool,
) -> WorkspaceReport
where
    F: Fn(Option<f64>, f64) -> Option<f64> + Sync,
    R: Fn(f64, f64) -> f64 + Sync,
{
    let row_ids = expand_row_ids(streamed);
    let stream = Stream::new(streamed, &row_ids);
    let n_cols = resident.n_cols();
    let stats: PassStats = match strat.kind {
        StrategyKind::BalancedDense => balanced_pass(
            resident,
            &stream,
            out,
            streamed.n_rows(),
            || DenseAccumulator::new(n_cols),
            |d| vec![0..d],
            reduce,
            identity,
            contrib,
            skip_empty,
        ),
        StrategyKind::BalancedHash => {
            let capacity = strat
                .accumulator_capacity
                .expect("hash strategy resolved without a capacity");
            let budget = chunk_budget(capacity, strat.max_load_factor);
            balanced_pass(
                resident,
                &stream,
                out,
                streamed.n_rows(),
                || HashAccumulator::with_capacity(capacity),
                |d| chunk::plan_chunks_with_budget(d, budget),
                reduce,
                identity,
                contrib,
                skip_empty,
            )
        }
        StrategyKind::Auto | StrategyKind::NaiveMerge => unreachable!("not a balanced strategy"),
    };
    WorkspaceReport {
        strategy: Some(strat.kind),
        passes: 1,
        peak_accumulator_entries: stats.peak_entries,
        accumulator_slots: stats.slots,
        workspace_elements: row_ids.len(),
        chunks_executed: stats.chunks,
    }
}

fn naive_report(a: &CsrMatrix, b: &CsrMatrix) -> WorkspaceReport {
    WorkspaceReport {
        strategy: Some(StrategyKind::NaiveMerge),
        passes: 1,
        chunks_executed: a.n_rows() * b.n_rows(),
        ..WorkspaceReport::default()
    }
}

fn pass1_resolved(
    a: &CsrMatrix,
    b: &CsrMatrix,
    s: &Semiring,
    strat: &ExecutionStrategy,
    out: &mut [f64],
) -> WorkspaceReport {
    let identity = s.reduce_identity;
    with_ops!(s, |prod, red| {
        if s.annihilating {
            let contrib = |res: Option<f64>, v: f64| res.map(|x| prod(x, v));
            match strat.kind {
                StrategyKind::NaiveMerge => {
                    naive::naive_pass1(a, b, out, &red, &contrib);
                    naive_report(a, b)
                }
                _ => balanced_run(a, b, strat, out, &red, identity, &contrib, true),
            }
        } else {
            let contrib = |res: Option<f64>, v: f64| Some(prod(res.unwrap_or(0.0), v));
            match strat.kind {
                StrategyKind::NaiveMerge => {
                    naive::naive_pass1(a, b, out, &red, &contrib);
                    naive_report(a, b)
                }
                _ => balanced_run(a, b, strat, out, &red, identity, &contrib, false),
            }
        }
    })
}

fn pass2_resolved(
    a: &CsrMatrix,
    b: &CsrMatrix,
    s: &Semiring,
    strat: &ExecutionStrategy,
    out: &mut [f64],
) -> WorkspaceReport {
    let identity = s.reduce_identity;
    let (m, n) = (a.n_rows(), b.n_rows());
    with_ops!(s, |prod, red| {
        // Columns stored in both rows were already handled by pass 1.
        let contrib = |res: Option<f64>, v: f64| match res {
            Some(_) => None,
            None => Some(prod(v, 0.0)),
        };
        match strat.kind {
            StrategyKind::NaiveMerge => {
                naive::naive_pass2(a, b, out, &red, &contrib);
                naive_report(a, b)
            }
            _ => {
                // Operands commuted: B rows are resident, A is streamed, so
                // partial results land transposed.
                let mut scratch = vec![identity; n * m];
                let report =
                    balanced_run(b, a, strat, &mut scratch, &red, identity, &contrib, false);
                if n > 0 {
                    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                        for (j, cell) in row.iter_mut().enumerate() {
                            *cell = red(*cell, scratch[j * m + i]);
                        }
                    });
                }
                report
            }
        }
    })
}

/// First pass: for every `(i, j)` reduces `⊗(A_i[c], B_j[c])` into
/// `out[i][j]` for each nonzero column `c` of `B_j`, reading absent `A_i`
/// entries as 0. For annihilating semirings only columns stored in both
/// rows are evaluated, and this pass alone gives the full result.
///
/// `out` must be `A.n_rows() x B.n_rows()` and is expected to start at the
/// reduce identity.
pub fn pairwise_spmv_pass1(
    a: &CsrMatrix,
    b: &CsrMatrix,
    s: &Semiring,
    strat: &ExecutionStrategy,
    out: &mut DistanceOutput,
) -> Result<WorkspaceReport> {
    check_dims(a, b)?;
    check_out(out, a.n_rows(), b.n_rows())?;
    strat.validate()?;
    let strat = strat.resolve(a, b);
    Ok(pass1_resolved(a, b, s, &strat, out.as_mut_slice()))
}

/// Second pass with the operands commuted: reduces `⊗(A_i[c], 0)` into
/// `out[i][j]` for every nonzero column `c` of `A_i` that is absent from
/// `B_j`. Columns in the intersection are skipped.
///
/// The pass always evaluates the product against 0; it is only meaningful
/// for semirings whose structural zero is the number 0.
pub fn pairwise_spmv_pass2(
    a: &CsrMatrix,
    b: &CsrMatrix,
    s: &Semiring,
    strat: &ExecutionStrategy,
    out: &mut DistanceOutput,
) -> Result<WorkspaceReport> {
    check_dims(a, b)?;
    check_out(out, a.n_rows(), b.n_rows())?;
    strat.validate()?;
    let strat = strat.resolve(a, b);
    Ok(pass2_resolved(a, b, s, &strat, out.as_mut_slice()))
}

pub(crate) fn run_generalized(
    a: &CsrMatrix,
    b: &CsrMatrix,
    s: &Semiring,
    strat: &ExecutionStrategy,
) -> Result<(DistanceOutput, WorkspaceReport, PassTimings)> {
    check_dims(a, b)?;
    strat.validate()?;
    let strat = strat.resolve(a, b);
    let mut out = DistanceOutput::filled(a.n_rows(), b.n_rows(), s.reduce_identity);
    let mut timings = PassTimings::default();

    if strat.kind == StrategyKind::NaiveMerge {
        let t = Instant::now();
        with_ops!(s, |prod, red| {
            if s.annihilating {
                naive::naive_union::<true, _, _>(a, b, out.as_mut_slice(), &prod, &red)
            } else {
                naive::naive_union::<false, _, _>(a, b, out.as_mut_slice(), &prod, &red)
            }
        });
        timings.pass1 = t.elapsed().as_secs_f64();
        return Ok((out, naive_report(a, b), timings));
    }

    let t = Instant::now();
    let mut report = pass1_resolved(a, b, s, &strat, out.as_mut_slice());
    timings.pass1 = t.elapsed().as_secs_f64();
    if !s.annihilating {
        let t = Instant::now();
        let second = pass2_resolved(a, b, s, &strat, out.as_mut_slice());
        timings.pass2 = t.elapsed().as_secs_f64();
        report = report.merge(&second);
    }
    Ok((out, report, timings))
}

/// Evaluates `s` between every row of `A` and every row of `B`.
///
/// Runs pass 1, and pass 2 as well when the semiring is non-annihilating.
/// `A` and `B` may be the same matrix.
pub fn pairwise_generalized(
    a: &CsrMatrix,
    b: &CsrMatrix,
    s: &Semiring,
    strat: &ExecutionStrategy,
) -> Result<(DistanceOutput, WorkspaceReport)> {
    let (out, report, _) = run_generalized(a, b, s, strat)?;
    Ok((out, report))
}

//! Query benchmarks: load (or generate) a matrix, then time k-nearest
//! neighbor queries against it under one or more execution strategies.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{ExecutionStrategy, WorkspaceReport};
use crate::error::{Error, Result};
use crate::io::{generate, read_matrix_market, GenSpec};
use crate::knn::{kneighbors_with_stats, BatchPlan, DEFAULT_MEMORY_BUDGET};
use crate::metrics::{MetricParams, MetricSpec, PhaseTimings};
use crate::sparse::{degree_stats, CsrMatrix, DegreeStats};

/// Values are rounded to this step before hashing.
pub const CHECKSUM_QUANTUM: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum InputSource {
    Generated(GenSpec),
    File(PathBuf),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: InputSource,
    pub metric: String,
    pub params: MetricParams,
    pub strategies: Vec<ExecutionStrategy>,
    pub k: usize,
    /// Query the first `n` rows; `None` queries every row.
    pub query_rows: Option<usize>,
    /// `None` sizes batches from [`DEFAULT_MEMORY_BUDGET`].
    pub batch_rows: Option<usize>,
    pub repeat: usize,
}

impl RunConfig {
    pub fn new(input: InputSource, metric: &str) -> Self {
        RunConfig {
            input,
            metric: metric.to_string(),
            params: MetricParams::default(),
            strategies: vec![
                ExecutionStrategy::naive(),
                ExecutionStrategy::dense(),
                ExecutionStrategy::hash_auto_capacity(),
            ],
            k: 10,
            query_rows: None,
            batch_rows: None,
            repeat: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrategyReport {
    pub strategy: String,
    /// Query wall time of every repetition, seconds.
    pub query_seconds: Vec<f64>,
    pub best_seconds: f64,
    /// Phase breakdown of the fastest repetition.
    pub phases: PhaseTimings,
    pub topk_seconds: f64,
    pub batch: BatchPlan,
    pub workspace: WorkspaceReport,
    pub checksum: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub metric: String,
    pub passes: u8,
    pub n_rows: usize,
    pub n_cols: usize,
    pub nnz: usize,
    pub n_queries: usize,
    pub k: usize,
    pub workers: usize,
    pub load_seconds: f64,
    pub degrees: DegreeStats,
    pub runs: Vec<StrategyReport>,
}

impl BenchReport {
    pub fn run(&self, strategy: &str) -> Option<&StrategyReport> {
        self.runs.iter().find(|r| r.strategy == strategy)
    }

    /// True when every strategy produced the same checksum.
    pub fn checksums_agree(&self) -> bool {
        self.runs.windows(2).all(|w| w[0].checksum == w[1].checksum)
    }
}

/// SHA-256 of the values rounded to [`CHECKSUM_QUANTUM`], as hex.
pub fn checksum(values: &[f64]) -> String {
    let mut h = Sha256::new();
    for &v in values {
        let q = if v.is_finite() {
            let r = (v / CHECKSUM_QUANTUM).round();
            // -0.0 and 0.0 must hash alike.
            (if r == 0.0 { 0.0 } else { r }).to_bits()
        } else {
            v.to_bits()
        };
        h.update(q.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_input(input: &InputSource) -> Result<CsrMatrix> {
    match input {
        InputSource::Generated(spec) => generate(spec),
        InputSource::File(path) => read_matrix_market(path),
    }
}

/// Runs the configured benchmark. Loading is timed separately and excluded
/// from query times.
pub fn run_bench(config: &RunConfig) -> Result<BenchReport> {
    if config.repeat == 0 {
        return Err(Error::InvalidParam("repeat must be at least 1".into()));
    }
    if config.strategies.is_empty() {
        return Err(Error::InvalidParam("no strategies to benchmark".into()));
    }
    let spec = MetricSpec::new(config.metric.parse()?, config.params)?;

    let t = Instant::now();
    let index = load_input(&config.input)?;
    let load_seconds = t.elapsed().as_secs_f64();

    let n_queries = config.query_rows.unwrap_or(index.n_rows()).min(index.n_rows());
    let queries = index.slice_rows(0..n_queries);
    let batch_rows = match config.batch_rows {
        Some(b) => b,
        None => BatchPlan::from_memory_budget(n_queries, index.n_rows(), DEFAULT_MEMORY_BUDGET).batch_rows,
    };

    let mut runs = Vec::with_capacity(config.strategies.len());
    for strat in &config.strategies {
        strat.validate()?;
        let mut best: Option<StrategyReport> = None;
        let mut times = Vec::with_capacity(config.repeat);
        for _ in 0..config.repeat {
            let t = Instant::now();
            let (result, stats) =
                kneighbors_with_stats(&index, &queries, config.k, &spec, strat, batch_rows)?;
            let secs = t.elapsed().as_secs_f64();
            times.push(secs);
            if best.as_ref().is_none_or(|b| secs < b.best_seconds) {
                best = Some(StrategyReport {
                    strategy: strat.kind.to_string(),
                    query_seconds: Vec::new(),
                    best_seconds: secs,
                    phases: stats.phases,
                    topk_seconds: stats.topk_seconds,
                    batch: stats.plan.clone().expect("plan is always set"),
                    workspace: stats.workspace,
                    checksum: checksum(&result.distances),
                });
            }
        }
        let mut report = best.expect("repeat >= 1");
        report.query_seconds = times;
        runs.push(report);
    }

    Ok(BenchReport {
        metric: spec.name().to_string(),
        passes: spec.passes,
        n_rows: index.n_rows(),
        n_cols: index.n_cols(),
        nnz: index.nnz(),
        n_queries,
        k: config.k,
        workers: rayon::current_num_threads(),
        load_seconds,
        degrees: degree_stats(&index),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{DegreeDist, ValueDist};

    #[test]
    fn checksum_absorbs_rounding_noise() {
        assert_eq!(checksum(&[1.0, 0.0]), checksum(&[1.0 + 1e-12, -0.0]));
        assert_ne!(checksum(&[1.0]), checksum(&[1.0 + 1e-6]));
        assert_eq!(checksum(&[f64::INFINITY]), checksum(&[f64::INFINITY]));
    }

    #[test]
    fn strategies_share_a_checksum() {
        let spec = GenSpec {
            n_rows: 300,
            n_cols: 200,
            degrees: DegreeDist::Zipf { s: 1.1, max_deg: 80 },
            values: ValueDist::Uniform01,
            seed: 11,
        };
        let mut cfg = RunConfig::new(InputSource::Generated(spec), "manhattan");
        cfg.strategies.push(ExecutionStrategy::hash(16));
        cfg.batch_rows = Some(64);
        let report = run_bench(&cfg).unwrap();
        assert_eq!(report.runs.len(), 4);
        assert!(report.checksums_agree(), "{:?}", report.runs);
        assert_eq!(report.passes, 2);
    }

    #[test]
    fn dot_runs_one_pass() {
        let spec = GenSpec {
            n_rows: 50,
            n_cols: 40,
            degrees: DegreeDist::Uniform(5),
            values: ValueDist::Uniform01,
            seed: 1,
        };
        let mut cfg = RunConfig::new(InputSource::Generated(spec), "dot");
        cfg.k = 3;
        let report = run_bench(&cfg).unwrap();
        assert_eq!(report.passes, 1);
        assert!(report.runs.iter().all(|r| r.workspace.passes == 1));
    }
}

//! Randomized engine-versus-oracle checks, shared by the `verify` command
//! and the test suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::ExecutionStrategy;
use crate::error::Result;
use crate::metrics::{pairwise_distances, Metric, MetricParams, MetricSpec};
use crate::oracle::{densify, oracle_pairwise};
use crate::sparse::CsrMatrix;

pub const REL_TOL: f64 = 1e-6;
pub const ABS_TOL: f64 = 1e-9;

/// `|got - want| <= abs + rel * |want|`; equal infinities match.
pub fn within_tolerance(got: f64, want: f64, rel: f64, abs: f64) -> bool {
    got == want || (got - want).abs() <= abs + rel * want.abs()
}

/// Shape and density bounds for random instances.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct InstanceBounds {
    pub max_rows: usize,
    pub max_cols: usize,
    pub min_density: f64,
    pub max_density: f64,
}

impl Default for InstanceBounds {
    fn default() -> Self {
        InstanceBounds {
            max_rows: 40,
            max_cols: 32,
            min_density: 0.05,
            max_density: 0.5,
        }
    }
}

fn random_matrix(
    rng: &mut impl Rng,
    n_rows: usize,
    n_cols: usize,
    density: f64,
    value: &mut impl FnMut(&mut dyn rand::RngCore) -> f64,
) -> CsrMatrix {
    let mut triplets = Vec::new();
    for r in 0..n_rows {
        for c in 0..n_cols {
            if rng.random::<f64>() < density {
                triplets.push((r, c, value(rng)));
            }
        }
    }
    CsrMatrix::from_triplets(n_rows, n_cols, triplets).expect("indices are in range")
}

/// A random `(A, B)` pair suited to `metric`: binary data for set metrics,
/// positive data where logarithms or roots need it, and full-support `B`
/// for KL so every cell is finite.
pub fn random_instance(
    rng: &mut impl Rng,
    metric: Metric,
    bounds: &InstanceBounds,
) -> (CsrMatrix, CsrMatrix) {
    let m = rng.random_range(1..=bounds.max_rows);
    let n = rng.random_range(1..=bounds.max_rows);
    let k = rng.random_range(1..=bounds.max_cols);
    let density = rng.random_range(bounds.min_density..=bounds.max_density);

    let mut value = |r: &mut dyn rand::RngCore| -> f64 {
        if metric.expects_binary() {
            1.0
        } else if metric.requires_non_negative() {
            1.0 - r.random::<f64>()
        } else {
            let v = 1.0 - r.random::<f64>();
            if r.random::<bool>() {
                v
            } else {
                -v
            }
        }
    };
    let a = random_matrix(rng, m, k, density, &mut value);
    let b_density = if metric == Metric::Kl { 1.0 } else { density };
    let b = random_matrix(rng, n, k, b_density, &mut value);
    (a, b)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerifyReport {
    pub metric: String,
    pub trials: usize,
    pub cells: usize,
    pub failures: usize,
    pub max_abs_err: f64,
    /// First failing cell, if any: `(trial, strategy, i, j, got, want)`.
    pub first_failure: Option<(usize, String, usize, usize, f64, f64)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Compares every strategy against the dense oracle on `trials` random
/// instances.
pub fn verify_metric(
    metric: Metric,
    params: MetricParams,
    trials: usize,
    bounds: &InstanceBounds,
    seed: u64,
) -> Result<VerifyReport> {
    let spec = MetricSpec::new(metric, params)?;
    let strategies = [
        ExecutionStrategy::naive(),
        ExecutionStrategy::dense(),
        ExecutionStrategy::hash_auto_capacity(),
        ExecutionStrategy::hash(4),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport {
        metric: metric.name().to_string(),
        trials,
        ..Default::default()
    };
    for trial in 0..trials {
        let (a, b) = random_instance(&mut rng, metric, bounds);
        let want = oracle_pairwise(&densify(&a)?, &densify(&b)?, metric.name(), params.p)?;
        for strat in &strategies {
            let got = pairwise_distances(&a, &b, &spec, strat)?;
            for (idx, (&g, &w)) in got.as_slice().iter().zip(&want).enumerate() {
                report.cells += 1;
                let err = (g - w).abs();
                if err.is_finite() {
                    report.max_abs_err = report.max_abs_err.max(err);
                }
                if !within_tolerance(g, w, REL_TOL, ABS_TOL) {
                    report.failures += 1;
                    if report.first_failure.is_none() {
                        let (i, j) = (idx / b.n_rows(), idx % b.n_rows());
                        report.first_failure = Some((trial, strat.kind.to_string(), i, j, g, w));
                    }
                }
            }
        }
    }
    Ok(report)
}

//! Catalog of the supported distances and the user-facing pairwise
//! distance computation.
//!
//! Each metric is either *expanded* (a single intersection pass of an
//! annihilating semiring, combined with row norms afterwards) or computed
//! with a non-annihilating product over the full union of nonzero columns
//! (two passes).
//!
//! | metric          | semiring product        | reduce  | norms        | post           |
//! |-----------------|-------------------------|---------|--------------|----------------|
//! | `correlation`   | `x*y`                   | `+`     | sum, `L2^2`  | expansion      |
//! | `cosine`        | `x*y`                   | `+`     | `L2`         | expansion      |
//! | `dice`          | `x*y`                   | `+`     | `L0`         | expansion      |
//! | `dot`           | `x*y`                   | `+`     |              |                |
//! | `euclidean`     | `x*y`                   | `+`     | `L2^2`       | expansion      |
//! | `hellinger`     | `sqrt(x)*sqrt(y)`       | `+`     | `L1`         | expansion      |
//! | `jaccard`       | `x*y`                   | `+`     | `L0`         | expansion      |
//! | `kl`            | `x ln(x/y)`             | `+`     |              |                |
//! | `russelrao`     | `x*y`                   | `+`     |              | expansion      |
//! | `canberra`      | `|x-y|/(|x|+|y|)`       | `+`     |              |                |
//! | `chebyshev`     | `|x-y|`                 | `max`   |              |                |
//! | `hamming`       | `x != y`                | `+`     |              | `/ k`          |
//! | `jensenshannon` | `x ln(x/m) + y ln(y/m)` | `+`     |              | `sqrt(s / 2)`  |
//! | `manhattan`     | `|x-y|`                 | `+`     |              |                |
//! | `minkowski`     | `|x-y|^p`               | `+`     |              | `s^(1/p)`      |

mod expansion;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{self, ExecutionStrategy, PassTimings, WorkspaceReport};
use crate::error::{Error, Result};
use crate::output::DistanceOutput;
use crate::semiring::{ProductOp, Semiring};
use crate::sparse::{row_norms, CsrMatrix, NormKind, NormVector};

pub use expansion::{expansion_apply, Expansion, RADICAND_TOL};

/// Value written for a KL cell whose divergence is infinite, in permissive
/// mode.
pub const KL_SATURATED: f64 = 1e300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Correlation,
    Cosine,
    Dice,
    Dot,
    Euclidean,
    Hellinger,
    Jaccard,
    Kl,
    RusselRao,
    Canberra,
    Chebyshev,
    Hamming,
    JensenShannon,
    Manhattan,
    Minkowski,
}

impl Metric {
    pub const ALL: [Metric; 15] = [
        Metric::Correlation,
        Metric::Cosine,
        Metric::Dice,
        Metric::Dot,
        Metric::Euclidean,
        Metric::Hellinger,
        Metric::Jaccard,
        Metric::Kl,
        Metric::RusselRao,
        Metric::Canberra,
        Metric::Chebyshev,
        Metric::Hamming,
        Metric::JensenShannon,
        Metric::Manhattan,
        Metric::Minkowski,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Correlation => "correlation",
            Metric::Cosine => "cosine",
            Metric::Dice => "dice",
            Metric::Dot => "dot",
            Metric::Euclidean => "euclidean",
            Metric::Hellinger => "hellinger",
            Metric::Jaccard => "jaccard",
            Metric::Kl => "kl",
            Metric::RusselRao => "russelrao",
            Metric::Canberra => "canberra",
            Metric::Chebyshev => "chebyshev",
            Metric::Hamming => "hamming",
            Metric::JensenShannon => "jensenshannon",
            Metric::Manhattan => "manhattan",
            Metric::Minkowski => "minkowski",
        }
    }

    /// Metrics whose set semantics assume 0/1 data.
    pub fn expects_binary(self) -> bool {
        matches!(
            self,
            Metric::Dice | Metric::Jaccard | Metric::RusselRao | Metric::Hamming
        )
    }

    pub fn requires_non_negative(self) -> bool {
        matches!(self, Metric::Kl | Metric::JensenShannon | Metric::Hellinger)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match norm.as_str() {
            "correlation" => Metric::Correlation,
            "cosine" => Metric::Cosine,
            "dice" | "dicesorensen" => Metric::Dice,
            "dot" | "dotproduct" | "inner" => Metric::Dot,
            "euclidean" | "l2" => Metric::Euclidean,
            "hellinger" => Metric::Hellinger,
            "jaccard" => Metric::Jaccard,
            "kl" | "kldivergence" => Metric::Kl,
            "russelrao" | "russellrao" => Metric::RusselRao,
            "canberra" => Metric::Canberra,
            "chebyshev" | "linf" => Metric::Chebyshev,
            "hamming" => Metric::Hamming,
            "jensenshannon" | "js" => Metric::JensenShannon,
            "manhattan" | "l1" | "cityblock" => Metric::Manhattan,
            "minkowski" => Metric::Minkowski,
            _ => return Err(Error::UnknownMetric(s.to_string())),
        })
    }
}

/// How KL treats columns with `a > 0` and `b = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KlMode {
    /// Report a domain error.
    #[default]
    Strict,
    /// Saturate the cell to [`KL_SATURATED`].
    Permissive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    /// Minkowski order.
    pub p: Option<f64>,
    pub kl_mode: KlMode,
}

impl MetricParams {
    pub fn with_p(p: f64) -> Self {
        MetricParams {
            p: Some(p),
            ..Default::default()
        }
    }
}

/// Scalar applied to every cell after the engine (and any expansion).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PostScale {
    /// `x^(1/p)`
    Root(f64),
    /// `sqrt(x / 2)`
    HalfSqrt,
    /// `x / k`
    DivideByCols,
}

impl PostScale {
    fn apply(self, x: f64, k: usize) -> Result<f64> {
        Ok(match self {
            PostScale::Root(p) => x.max(0.0).powf(1.0 / p),
            PostScale::HalfSqrt => expansion::clamped_sqrt(x, x.abs(), "jensenshannon")?
                / 2f64.sqrt(),
            PostScale::DivideByCols => {
                if k == 0 {
                    0.0
                } else {
                    x / k as f64
                }
            }
        })
    }
}

/// Everything needed to compute one distance: the semiring, the pass count,
/// which row norms to precompute and how to finish each cell.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub metric: Metric,
    pub semiring: Semiring,
    pub passes: u8,
    pub norms: Vec<NormKind>,
    pub expansion: Option<Expansion>,
    pub post_scale: Option<PostScale>,
    pub params: MetricParams,
}

/// Looks up a metric by its CLI name.
pub fn metric_registry(name: &str, params: MetricParams) -> Result<MetricSpec> {
    MetricSpec::new(name.parse()?, params)
}

impl MetricSpec {
    pub fn new(metric: Metric, params: MetricParams) -> Result<Self> {
        let expanded = |semiring: Semiring, expansion: Option<Expansion>| {
            let norms = expansion.map(|e| e.norms().to_vec()).unwrap_or_default();
            (semiring, norms, expansion, None)
        };
        let namm = |semiring: Semiring, post: Option<PostScale>| (semiring, Vec::new(), None, post);

        let (semiring, norms, expansion, post_scale) = match metric {
            Metric::Correlation => expanded(Semiring::dot_product(), Some(Expansion::Correlation)),
            Metric::Cosine => expanded(Semiring::dot_product(), Some(Expansion::Cosine)),
            Metric::Dice => expanded(Semiring::dot_product(), Some(Expansion::Dice)),
            Metric::Dot => expanded(Semiring::dot_product(), None),
            Metric::Euclidean => expanded(Semiring::dot_product(), Some(Expansion::Euclidean)),
            Metric::Hellinger => expanded(
                Semiring::annihilating_sum(ProductOp::SqrtMul),
                Some(Expansion::Hellinger),
            ),
            Metric::Jaccard => expanded(Semiring::dot_product(), Some(Expansion::Jaccard)),
            Metric::Kl => expanded(Semiring::annihilating_sum(ProductOp::KlTerm), None),
            Metric::RusselRao => expanded(Semiring::dot_product(), Some(Expansion::RusselRao)),
            Metric::Canberra => namm(Semiring::namm_sum(ProductOp::Canberra), None),
            Metric::Chebyshev => namm(Semiring::namm_max(ProductOp::AbsDiff), None),
            Metric::Hamming => namm(
                Semiring::namm_sum(ProductOp::NotEqual),
                Some(PostScale::DivideByCols),
            ),
            Metric::JensenShannon => namm(
                Semiring::namm_sum(ProductOp::JensenShannon),
                Some(PostScale::HalfSqrt),
            ),
            Metric::Manhattan => namm(Semiring::namm_sum(ProductOp::AbsDiff), None),
            Metric::Minkowski => {
                let p = params.p.ok_or(Error::MissingParam {
                    metric: "minkowski",
                    param: "p",
                })?;
                if p.is_nan() || p < 1.0 || p.is_infinite() {
                    return Err(Error::InvalidParam(format!(
                        "minkowski p = {p} must be a finite value >= 1"
                    )));
                }
                let product = if p == 1.0 {
                    ProductOp::AbsDiff
                } else {
                    ProductOp::AbsDiffPow(p)
                };
                namm(Semiring::namm_sum(product), Some(PostScale::Root(p)))
            }
        };
        let passes = semiring.passes();
        Ok(MetricSpec {
            metric,
            semiring,
            passes,
            norms,
            expansion,
            post_scale,
            params,
        })
    }

    pub fn name(&self) -> &'static str {
        self.metric.name()
    }
}

/// Wall time per phase of one distance computation, in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub norms: f64,
    pub pass1: f64,
    pub pass2: f64,
    pub expansion: f64,
}

impl PhaseTimings {
    pub fn total(&self) -> f64 {
        self.norms + self.pass1 + self.pass2 + self.expansion
    }
}

/// Output of [`compute_distances`] together with its accounting.
#[derive(Clone, Debug)]
pub struct DistanceRun {
    pub distances: DistanceOutput,
    pub workspace: WorkspaceReport,
    pub timings: PhaseTimings,
}

fn check_non_negative(name: &str, m: &CsrMatrix) -> Result<()> {
    if let Some(v) = m.values().iter().find(|&&v| v < 0.0) {
        return Err(Error::Domain(format!(
            "{name} requires non-negative input, found {v}"
        )));
    }
    Ok(())
}

/// Finds row pairs where `A_i` has a nonzero column that `B_j` lacks and
/// either errors or saturates those cells.
fn enforce_kl_support(
    a: &CsrMatrix,
    b: &CsrMatrix,
    strat: &ExecutionStrategy,
    mode: KlMode,
    out: &mut DistanceOutput,
) -> Result<()> {
    let shared = Semiring::annihilating_sum(ProductOp::BothNonzero);
    let (counts, _) = engine::pairwise_generalized(a, b, &shared, strat)?;
    let n = b.n_rows();
    for i in 0..a.n_rows() {
        let deg = a.row_degree(i) as f64;
        for j in 0..n {
            if counts.get(i, j) < deg {
                match mode {
                    KlMode::Strict => {
                        return Err(Error::Domain(format!(
                            "kl divergence is infinite for rows ({i}, {j}): \
                             a > 0 where b = 0"
                        )))
                    }
                    KlMode::Permissive => out.set(i, j, KL_SATURATED),
                }
            }
        }
    }
    Ok(())
}

/// Computes `d(A_i, B_j)` for every row pair, returning timings and
/// workspace accounting alongside.
pub fn compute_distances(
    a: &CsrMatrix,
    b: &CsrMatrix,
    spec: &MetricSpec,
    strat: &ExecutionStrategy,
) -> Result<DistanceRun> {
    if a.n_cols() != b.n_cols() {
        return Err(Error::DimensionMismatch {
            left: a.n_cols(),
            right: b.n_cols(),
        });
    }
    if spec.metric.requires_non_negative() {
        check_non_negative(spec.name(), a)?;
        check_non_negative(spec.name(), b)?;
    }
    let k = a.n_cols();
    let mut timings = PhaseTimings::default();

    let t = Instant::now();
    let norms_a: Vec<NormVector> = spec.norms.iter().map(|&kind| row_norms(a, kind)).collect();
    let norms_b: Vec<NormVector> = spec.norms.iter().map(|&kind| row_norms(b, kind)).collect();
    timings.norms = t.elapsed().as_secs_f64();

    let (raw, workspace, PassTimings { pass1, pass2 }) =
        engine::run_generalized(a, b, &spec.semiring, strat)?;
    timings.pass1 = pass1;
    timings.pass2 = pass2;

    let t = Instant::now();
    let mut distances = expansion_apply(&raw, &norms_a, &norms_b, spec, k)?;
    if let Some(post) = spec.post_scale {
        let n = distances.cols();
        if n > 0 {
            distances
                .as_mut_slice()
                .par_chunks_mut(n)
                .try_for_each(|row| -> Result<()> {
                    for v in row {
                        *v = post.apply(*v, k)?;
                    }
                    Ok(())
                })?;
        }
    }
    timings.expansion = t.elapsed().as_secs_f64();

    if spec.metric == Metric::Kl {
        enforce_kl_support(a, b, strat, spec.params.kl_mode, &mut distances)?;
    }

    Ok(DistanceRun {
        distances,
        workspace,
        timings,
    })
}

/// Pairwise distances between the rows of `A` and the rows of `B`.
pub fn pairwise_distances(
    a: &CsrMatrix,
    b: &CsrMatrix,
    spec: &MetricSpec,
    strat: &ExecutionStrategy,
) -> Result<DistanceOutput> {
    compute_distances(a, b, spec, strat).map(|run| run.distances)
}

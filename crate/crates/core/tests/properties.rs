use proptest::prelude::*;

use sparsedist::engine::{pairwise_spmv_pass1, pairwise_spmv_pass2, ExecutionStrategy};
use sparsedist::error::Error;
use sparsedist::io::{
    generate, parse_matrix_market, write_matrix_market_to, DegreeDist, GenSpec, ValueDist,
};
use sparsedist::knn::kneighbors;
use sparsedist::metrics::{
    metric_registry, pairwise_distances, KlMode, Metric, MetricParams, MetricSpec, KL_SATURATED,
};
use sparsedist::oracle::{densify, oracle_distance, oracle_pairwise};
use sparsedist::output::DistanceOutput;
use sparsedist::sparse::{validate_and_canonicalize, CsrMatrix, RawCsr};

/// Dense grid of optional values turned into a canonical matrix of exactly
/// `cols` columns.
fn matrix_with_width(rows: usize, cols: usize, lo: f64, hi: f64) -> impl Strategy<Value = CsrMatrix> {
    (1..=rows).prop_flat_map(move |r| {
        prop::collection::vec(prop::option::weighted(0.35, lo..hi), r * cols).prop_map(move |cells| {
            let dense: Vec<Vec<f64>> = cells
                .chunks(cols)
                .map(|row| row.iter().map(|v| v.unwrap_or(0.0)).collect())
                .collect();
            CsrMatrix::from_dense_rows(cols, &dense).unwrap()
        })
    })
}

fn matrix(rows: usize, cols: usize, lo: f64, hi: f64) -> impl Strategy<Value = CsrMatrix> {
    (1..=cols).prop_flat_map(move |c| matrix_with_width(rows, c, lo, hi))
}

/// Two matrices with the same column count.
fn pair(rows: usize, cols: usize, lo: f64, hi: f64) -> impl Strategy<Value = (CsrMatrix, CsrMatrix)> {
    (1..=cols).prop_flat_map(move |c| (matrix_with_width(rows, c, lo, hi), matrix_with_width(rows, c, lo, hi)))
}

fn strategies() -> [ExecutionStrategy; 4] {
    [
        ExecutionStrategy::naive(),
        ExecutionStrategy::dense(),
        ExecutionStrategy::hash_auto_capacity(),
        ExecutionStrategy::hash(4),
    ]
}

fn any_metric() -> impl Strategy<Value = Metric> {
    prop::sample::select(Metric::ALL.to_vec())
}

fn spec_for(metric: Metric) -> MetricSpec {
    let p = (metric == Metric::Minkowski).then_some(2.5);
    MetricSpec::new(
        metric,
        MetricParams {
            p,
            kl_mode: KlMode::Permissive,
        },
    )
    .unwrap()
}

fn binarize(m: &CsrMatrix) -> CsrMatrix {
    m.map_values(|_| 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_from_messy_triplets(
        n_rows in 1usize..8,
        n_cols in 1usize..8,
        raw in prop::collection::vec((0usize..8, 0usize..8, prop::sample::select(vec![0.0, 1.0, -1.0, 2.5])), 0..40),
    ) {
        let triplets: Vec<_> = raw.into_iter().map(|(r, c, v)| (r % n_rows, c % n_cols, v)).collect();
        let mut dense = vec![vec![0.0; n_cols]; n_rows];
        for &(r, c, v) in &triplets {
            dense[r][c] += v;
        }
        let m = CsrMatrix::from_triplets(n_rows, n_cols, triplets).unwrap();
        for (r, want) in dense.iter().enumerate() {
            let (cols, vals) = m.row(r);
            prop_assert!(cols.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(vals.iter().all(|&v| v != 0.0));
            for (c, &w) in want.iter().enumerate() {
                prop_assert_eq!(m.get(r, c), w);
            }
        }
    }

    #[test]
    fn strategies_agree((a, b) in pair(12, 12, -2.0, 2.0), metric in any_metric()) {
        let (a, b) = if metric.expects_binary() { (binarize(&a), binarize(&b)) } else { (a, b) };
        let (a, b) = if metric.requires_non_negative() {
            (a.map_values(f64::abs), b.map_values(f64::abs))
        } else {
            (a, b)
        };
        let spec = spec_for(metric);
        let outs: Vec<DistanceOutput> = strategies()
            .iter()
            .map(|s| pairwise_distances(&a, &b, &spec, s).unwrap())
            .collect();
        for o in &outs[1..] {
            prop_assert!(outs[0].max_abs_diff(o) <= 1e-10, "{metric}: {}", outs[0].max_abs_diff(o));
        }
    }

    #[test]
    fn union_decomposition_manhattan((a, b) in pair(10, 10, -3.0, 3.0)) {
        let spec = metric_registry("manhattan", MetricParams::default()).unwrap();
        let (da, db) = (densify(&a).unwrap(), densify(&b).unwrap());
        for strat in strategies() {
            let mut out = DistanceOutput::filled(a.n_rows(), b.n_rows(), 0.0);
            pairwise_spmv_pass1(&a, &b, &spec.semiring, &strat, &mut out).unwrap();
            pairwise_spmv_pass2(&a, &b, &spec.semiring, &strat, &mut out).unwrap();
            for i in 0..a.n_rows() {
                for j in 0..b.n_rows() {
                    let want: f64 = da.row(i).iter().zip(db.row(j)).map(|(x, y)| (x - y).abs()).sum();
                    prop_assert!((out.get(i, j) - want).abs() <= 1e-12 * want.max(1.0));
                }
            }
        }
    }

    #[test]
    fn chebyshev_is_exact((a, b) in pair(10, 10, -5.0, 5.0)) {
        let spec = metric_registry("chebyshev", MetricParams::default()).unwrap();
        let want = oracle_pairwise(&densify(&a).unwrap(), &densify(&b).unwrap(), "chebyshev", None).unwrap();
        for strat in strategies() {
            let got = pairwise_distances(&a, &b, &spec, &strat).unwrap();
            prop_assert_eq!(got.as_slice(), want.as_slice());
        }
    }

    #[test]
    fn hamming_counts_are_integers((a, b) in pair(10, 16, 0.5, 1.5)) {
        let (a, b) = (binarize(&a), binarize(&b));
        let spec = metric_registry("hamming", MetricParams::default()).unwrap();
        let k = a.n_cols() as f64;
        let d = pairwise_distances(&a, &b, &spec, &ExecutionStrategy::auto()).unwrap();
        for &v in d.as_slice() {
            let scaled = v * k;
            prop_assert!((scaled - scaled.round()).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn kl_matches_oracle_where_supported((a, b) in pair(8, 10, 0.1, 1.0)) {
        // Give every B row full support so all cells are finite.
        let b = b.map_values(|v| v + 0.1);
        let b = {
            let dense: Vec<Vec<f64>> = (0..b.n_rows())
                .map(|r| (0..b.n_cols()).map(|c| b.get(r, c).max(0.05)).collect())
                .collect();
            CsrMatrix::from_dense_rows(b.n_cols(), &dense).unwrap()
        };
        let spec = metric_registry("kl", MetricParams::default()).unwrap();
        let got = pairwise_distances(&a, &b, &spec, &ExecutionStrategy::auto()).unwrap();
        let want = oracle_pairwise(&densify(&a).unwrap(), &densify(&b).unwrap(), "kl", None).unwrap();
        for (g, w) in got.as_slice().iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-9 + 1e-9 * w.abs());
        }
    }

    #[test]
    fn distances_do_not_depend_on_worker_count((a, b) in pair(16, 12, 0.0, 1.0), metric in any_metric()) {
        let spec = spec_for(metric);
        let (a, b) = if metric.expects_binary() { (binarize(&a), binarize(&b)) } else { (a, b) };
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| pairwise_distances(&a, &b, &spec, &ExecutionStrategy::auto()).unwrap())
        };
        prop_assert_eq!(run(1), run(3));
    }

    #[test]
    fn symmetric_metrics_transpose((a, b) in pair(8, 10, 0.0, 1.0), metric in any_metric()) {
        prop_assume!(!matches!(metric, Metric::Kl));
        let (a, b) = if metric.expects_binary() { (binarize(&a), binarize(&b)) } else { (a, b) };
        let spec = spec_for(metric);
        let ab = pairwise_distances(&a, &b, &spec, &ExecutionStrategy::auto()).unwrap();
        let ba = pairwise_distances(&b, &a, &spec, &ExecutionStrategy::auto()).unwrap();
        for i in 0..a.n_rows() {
            for j in 0..b.n_rows() {
                prop_assert!((ab.get(i, j) - ba.get(j, i)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn knn_matches_exhaustive_sort(x in matrix(60, 12, 0.0, 1.0), k_frac in 0.0f64..=1.0, batch in 1usize..70) {
        let k = ((x.n_rows() as f64) * k_frac) as usize;
        let spec = metric_registry("manhattan", MetricParams::default()).unwrap();
        let got = kneighbors(&x, &x, k, &spec, &ExecutionStrategy::auto(), batch).unwrap();
        let whole = kneighbors(&x, &x, k, &spec, &ExecutionStrategy::auto(), x.n_rows()).unwrap();
        prop_assert_eq!(&got, &whole);
        let dx = densify(&x).unwrap();
        for q in 0..x.n_rows() {
            let d: Vec<f64> = (0..x.n_rows())
                .map(|j| oracle_distance(dx.row(q), dx.row(j), "manhattan", None).unwrap())
                .collect();
            for (pos, (&i, &dist)) in got.indices_row(q).iter().zip(got.distances_row(q)).enumerate() {
                prop_assert!((dist - d[i]).abs() <= 1e-12);
                // Nothing outside the returned set is strictly closer.
                let closer = d.iter().filter(|&&v| v < dist - 1e-12).count();
                prop_assert!(closer <= pos);
            }
        }
    }

    #[test]
    fn matrix_market_round_trip(x in matrix(10, 10, -1e6, 1e6)) {
        let mut buf = Vec::new();
        write_matrix_market_to(&x, &mut buf).unwrap();
        prop_assert_eq!(parse_matrix_market(buf.as_slice()).unwrap(), x);
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), rows in 0usize..50, deg in 0usize..20) {
        let spec = GenSpec {
            n_rows: rows,
            n_cols: 30,
            degrees: DegreeDist::Uniform(deg),
            values: ValueDist::TfIdf,
            seed,
        };
        let m = generate(&spec).unwrap();
        prop_assert_eq!(&m, &generate(&spec).unwrap());
        prop_assert_eq!(m.nnz(), rows * deg.min(30));
    }
}

#[test]
fn raw_csr_validation_errors() {
    let raw = |indptr: Vec<i64>, indices: Vec<i64>| RawCsr {
        n_rows: 2,
        n_cols: 3,
        values: vec![1.0; indices.len()],
        indptr,
        indices,
    };
    assert!(matches!(
        validate_and_canonicalize(raw(vec![0, 1, 2], vec![0, 5])),
        Err(Error::IndexOutOfBounds { .. })
    ));
    assert!(matches!(
        validate_and_canonicalize(raw(vec![0, 2, 1], vec![0, 1])),
        Err(Error::NonMonotonicIndptr { .. })
    ));
    assert!(matches!(
        validate_and_canonicalize(raw(vec![0, -1, 2], vec![0, 1])),
        Err(Error::NegativeOffset { .. })
    ));
}

#[test]
fn kl_unsupported_column_strict_and_permissive() {
    let a = CsrMatrix::from_dense_rows(2, &[[0.5, 0.5]]).unwrap();
    let b = CsrMatrix::from_dense_rows(2, &[[1.0, 0.0]]).unwrap();
    let strict = metric_registry("kl", MetricParams::default()).unwrap();
    assert!(matches!(
        pairwise_distances(&a, &b, &strict, &ExecutionStrategy::auto()),
        Err(Error::Domain(_))
    ));
    let permissive = MetricSpec::new(
        Metric::Kl,
        MetricParams {
            kl_mode: KlMode::Permissive,
            ..Default::default()
        },
    )
    .unwrap();
    let d = pairwise_distances(&a, &b, &permissive, &ExecutionStrategy::auto()).unwrap();
    assert_eq!(d.get(0, 0), KL_SATURATED);
}

#[test]
fn negative_input_rejected_where_roots_need_it() {
    let a = CsrMatrix::from_dense_rows(2, &[[-0.5, 0.5]]).unwrap();
    for name in ["hellinger", "jensenshannon", "kl"] {
        let spec = metric_registry(name, MetricParams::default()).unwrap();
        assert!(matches!(
            pairwise_distances(&a, &a, &spec, &ExecutionStrategy::auto()),
            Err(Error::Domain(_))
        ));
    }
}

#[test]
fn mismatched_widths_are_rejected() {
    let a = CsrMatrix::empty(2, 3);
    let b = CsrMatrix::empty(2, 4);
    let spec = metric_registry("euclidean", MetricParams::default()).unwrap();
    assert!(matches!(
        pairwise_distances(&a, &b, &spec, &ExecutionStrategy::auto()),
        Err(Error::DimensionMismatch { left: 3, right: 4 })
    ));
}

#[test]
fn zipf_mean_degree_within_ten_percent() {
    let dist = DegreeDist::Zipf { s: 1.1, max_deg: 500 };
    let m = generate(&GenSpec {
        n_rows: 5000,
        n_cols: 10_000,
        degrees: dist,
        values: ValueDist::Uniform01,
        seed: 21,
    })
    .unwrap();
    let mean = m.nnz() as f64 / m.n_rows() as f64;
    let target = dist.expected_degree(10_000);
    assert!((mean - target).abs() <= 0.1 * target, "mean {mean} target {target}");
}

#[test]
fn zipf_degree_ks_sanity() {
    let (s, max_deg) = (1.1, 200);
    let m = generate(&GenSpec {
        n_rows: 4000,
        n_cols: 1000,
        degrees: DegreeDist::Zipf { s, max_deg },
        values: ValueDist::Uniform01,
        seed: 5,
    })
    .unwrap();
    let weights: Vec<f64> = (1..=max_deg).map(|k| (k as f64).powf(-s)).collect();
    let total: f64 = weights.iter().sum();
    let mut counts = vec![0usize; max_deg + 1];
    for r in 0..m.n_rows() {
        counts[m.row_degree(r)] += 1;
    }
    let n = m.n_rows() as f64;
    let (mut cdf, mut emp, mut ks) = (0.0, 0.0, 0.0f64);
    for k in 1..=max_deg {
        cdf += weights[k - 1] / total;
        emp += counts[k] as f64 / n;
        ks = ks.max((cdf - emp).abs());
    }
    // 99.9% critical value for one sample of size n.
    assert!(ks < 1.95 / n.sqrt(), "KS statistic {ks}");
}

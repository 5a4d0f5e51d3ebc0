//! Acceptance gate. Runs every criterion in sequence (timing-sensitive ones
//! must not share the machine with each other), prints one PASS/FAIL line
//! per criterion and fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparsedist::bench::{run_bench, InputSource, RunConfig};
use sparsedist::engine::{
    pairwise_generalized, pairwise_spmv_pass1, pairwise_spmv_pass2, plan_chunks,
    ExecutionStrategy,
};
use sparsedist::io::{generate, DegreeDist, GenSpec, ValueDist};
use sparsedist::knn::kneighbors;
use sparsedist::metrics::{
    metric_registry, pairwise_distances, Metric, MetricParams, MetricSpec,
};
use sparsedist::oracle::{densify, oracle_distance, oracle_min_plus, oracle_semiring_dense};
use sparsedist::output::DistanceOutput;
use sparsedist::semiring::Semiring;
use sparsedist::sparse::CsrMatrix;
use sparsedist::verify::{random_instance, verify_metric, InstanceBounds};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn params_for(metric: Metric) -> MetricParams {
    MetricParams {
        p: (metric == Metric::Minkowski).then_some(3.0),
        ..Default::default()
    }
}

fn strategies() -> Vec<ExecutionStrategy> {
    vec![
        ExecutionStrategy::naive(),
        ExecutionStrategy::dense(),
        ExecutionStrategy::hash_auto_capacity(),
    ]
}

fn c1_disjoint_manhattan() -> Outcome {
    let t = Instant::now();
    let a = CsrMatrix::from_dense_rows(3, &[[1.0, 0.0, 1.0]]).unwrap();
    let b = CsrMatrix::from_dense_rows(3, &[[0.0, 1.0, 0.0]]).unwrap();
    let spec = metric_registry("manhattan", MetricParams::default()).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for strat in strategies() {
        let full = pairwise_distances(&a, &b, &spec, &strat).unwrap().get(0, 0);
        let mut p1 = DistanceOutput::filled(1, 1, 0.0);
        pairwise_spmv_pass1(&a, &b, &spec.semiring, &strat, &mut p1).unwrap();
        ok &= full == 3.0 && p1.get(0, 0) == 1.0;
        notes.push(format!("{}: full={} pass1={}", strat.kind, full, p1.get(0, 0)));
    }
    let secs = t.elapsed().as_secs_f64();
    (ok && secs < 1.0, format!("{} in {secs:.3}s", notes.join(", ")))
}

fn c2_oracle_suite() -> Outcome {
    let t = Instant::now();
    let bounds = InstanceBounds::default();
    let mut failed = Vec::new();
    let mut cells = 0;
    for metric in Metric::ALL {
        let r = verify_metric(metric, params_for(metric), 50, &bounds, 2024).unwrap();
        cells += r.cells;
        if !r.passed() {
            failed.push(format!("{} {:?}", r.metric, r.first_failure));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        failed.is_empty() && secs < 60.0,
        format!("15 metrics x 50 instances, {cells} cells, failures: {failed:?}, {secs:.1}s"),
    )
}

fn c3_strategy_equivalence() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let plain = InstanceBounds::default();
    let dense_rows = InstanceBounds {
        min_density: 0.6,
        max_density: 1.0,
        ..InstanceBounds::default()
    };
    const SMALL_CAP: usize = 8;
    let mut worst: f64 = 0.0;
    let mut chunked_instances = 0;
    let mut occupancy_ok = true;
    for metric in Metric::ALL {
        let spec = MetricSpec::new(metric, params_for(metric)).unwrap();
        for trial in 0..20 {
            // Half the instances carry rows longer than half the small table.
            let engineered = trial % 2 == 1;
            let bounds = if engineered { &dense_rows } else { &plain };
            let needs_chunks = |a: &CsrMatrix, b: &CsrMatrix| {
                let longest = a.max_degree().max(b.max_degree());
                longest > SMALL_CAP / 2
                    && plan_chunks(longest, &ExecutionStrategy::hash(SMALL_CAP)).len() > 1
            };
            let (a, b) = loop {
                let (a, b) = random_instance(&mut rng, metric, bounds);
                if !engineered || needs_chunks(&a, &b) {
                    break (a, b);
                }
            };
            chunked_instances += usize::from(needs_chunks(&a, &b));
            let mut strats = strategies();
            strats.push(ExecutionStrategy::hash(SMALL_CAP));
            let reference = pairwise_distances(&a, &b, &spec, &strats[0]).unwrap();
            for s in &strats[1..] {
                let run = sparsedist::metrics::compute_distances(&a, &b, &spec, s).unwrap();
                worst = worst.max(reference.max_abs_diff(&run.distances));
                if s.accumulator_capacity == Some(SMALL_CAP) {
                    occupancy_ok &= run.workspace.peak_occupancy() <= 0.5;
                }
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        worst <= 1e-10 && chunked_instances >= 15 * 10 && occupancy_ok && secs < 60.0,
        format!(
            "max |naive - balanced| = {worst:.2e}, {chunked_instances} chunked instances, \
             occupancy <= 50%: {occupancy_ok}, {secs:.1}s"
        ),
    )
}

/// All `2^k` zero patterns as rows; present entries get position-dependent
/// values.
fn pattern_rows(k: usize, base: f64, step: f64) -> CsrMatrix {
    let rows: Vec<Vec<f64>> = (0..1usize << k)
        .map(|mask| {
            (0..k)
                .map(|c| if mask >> c & 1 == 1 { base + step * c as f64 } else { 0.0 })
                .collect()
        })
        .collect();
    CsrMatrix::from_dense_rows(k, &rows).unwrap()
}

fn two_pass_matches_fold(a: &CsrMatrix, b: &CsrMatrix, s: &Semiring, strat: &ExecutionStrategy) -> f64 {
    let mut out = DistanceOutput::filled(a.n_rows(), b.n_rows(), s.reduce_identity);
    pairwise_spmv_pass1(a, b, s, strat, &mut out).unwrap();
    pairwise_spmv_pass2(a, b, s, strat, &mut out).unwrap();
    let (da, db) = (densify(a).unwrap(), densify(b).unwrap());
    let mut worst: f64 = 0.0;
    for i in 0..a.n_rows() {
        for j in 0..b.n_rows() {
            let want = oracle_semiring_dense(
                da.row(i),
                db.row(j),
                |x, y| s.product(x, y),
                |acc, v| s.reduce(acc, v),
                s.reduce_identity,
            );
            let err = (out.get(i, j) - want).abs() / want.abs().max(1.0);
            worst = worst.max(err);
        }
    }
    worst
}

fn c4_two_pass() -> Outcome {
    let t = Instant::now();
    let namm: Vec<Metric> = Metric::ALL
        .into_iter()
        .filter(|&m| MetricSpec::new(m, params_for(m)).unwrap().passes == 2)
        .collect();
    let mut worst: f64 = 0.0;
    let mut pairs = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for &metric in &namm {
        let spec = MetricSpec::new(metric, params_for(metric)).unwrap();
        for strat in strategies().into_iter().chain([ExecutionStrategy::hash(4)]) {
            for k in 1..=6 {
                let (a, b) = if metric.expects_binary() {
                    (pattern_rows(k, 1.0, 0.0), pattern_rows(k, 1.0, 0.0))
                } else {
                    (pattern_rows(k, 0.5, 0.25), pattern_rows(k, 1.5, -0.125))
                };
                pairs += a.n_rows() * b.n_rows();
                worst = worst.max(two_pass_matches_fold(&a, &b, &spec.semiring, &strat));
            }
            for _ in 0..10 {
                let bounds = InstanceBounds {
                    max_rows: 30,
                    max_cols: 64,
                    min_density: 0.05,
                    max_density: 0.6,
                };
                let (a, b) = random_instance(&mut rng, metric, &bounds);
                pairs += a.n_rows() * b.n_rows();
                worst = worst.max(two_pass_matches_fold(&a, &b, &spec.semiring, &strat));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let names: Vec<&str> = namm.iter().map(|m| m.name()).collect();
    (
        worst <= 1e-12 && namm.len() == 6 && secs < 30.0,
        format!("{names:?}, {pairs} row pairs, max rel err {worst:.2e}, {secs:.1}s"),
    )
}

fn c5_expanded_vs_exhaustive() -> Outcome {
    let t = Instant::now();
    let euclid = metric_registry("euclidean", MetricParams::default()).unwrap();
    let mink = metric_registry("minkowski", MetricParams::with_p(2.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        // Hellinger draws non-negative values.
        let (a, b) = random_instance(&mut rng, Metric::Hellinger, &InstanceBounds::default());
        let de = pairwise_distances(&a, &b, &euclid, &ExecutionStrategy::auto()).unwrap();
        let dm = pairwise_distances(&a, &b, &mink, &ExecutionStrategy::auto()).unwrap();
        for (&x, &y) in de.as_slice().iter().zip(dm.as_slice()) {
            let rel = if x == y { 0.0 } else { (x - y).abs() / y.abs().max(1e-300) };
            worst = worst.max(rel);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        worst <= 1e-6 && secs < 10.0,
        format!("50 instances, max relative gap {worst:.2e}, {secs:.2}s"),
    )
}

fn c6_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = generate(&GenSpec {
        n_rows: 80,
        n_cols: 24,
        degrees: DegreeDist::Density(0.3),
        values: ValueDist::Uniform01,
        seed: 6,
    })
    .unwrap();
    let cases: Vec<(&str, Option<f64>)> = vec![
        ("euclidean", None),
        ("manhattan", None),
        ("minkowski", Some(1.0)),
        ("minkowski", Some(1.5)),
        ("minkowski", Some(2.0)),
        ("minkowski", Some(3.0)),
        ("chebyshev", None),
        ("canberra", None),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, p) in cases {
        let spec = metric_registry(name, MetricParams { p, ..Default::default() }).unwrap();
        let d = pairwise_distances(&x, &x, &spec, &ExecutionStrategy::auto()).unwrap();
        let n = x.n_rows();
        let self_max = (0..n).map(|i| d.get(i, i).abs()).fold(0.0, f64::max);
        let mut sym_max: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                sym_max = sym_max.max((d.get(i, j) - d.get(j, i)).abs());
            }
        }
        let mut violations = 0;
        for _ in 0..1000 {
            let (i, j, l) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            if d.get(i, l) > d.get(i, j) + d.get(j, l) + 1e-9 {
                violations += 1;
            }
        }
        let pass = self_max <= 1e-9 && sym_max <= 1e-9 && violations == 0;
        ok &= pass;
        if !pass {
            notes.push(format!("{name}{p:?}: self {self_max:.1e} sym {sym_max:.1e} tri {violations}"));
        }
    }
    (ok, format!("8 metric configurations, 1000 triples each; problems: {notes:?}"))
}

fn c7_workspace() -> Outcome {
    let index = generate(&GenSpec {
        n_rows: 10_000,
        n_cols: 10_000,
        degrees: DegreeDist::Uniform(50),
        values: ValueDist::Uniform01,
        seed: 7,
    })
    .unwrap();
    let queries = index.slice_rows(0..100);
    let spec = metric_registry("manhattan", MetricParams::default()).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for strat in [
        ExecutionStrategy::dense(),
        ExecutionStrategy::hash_auto_capacity(),
        ExecutionStrategy::hash(64),
    ] {
        let run = sparsedist::metrics::compute_distances(&queries, &index, &spec, &strat).unwrap();
        let w = &run.workspace;
        let staging_ok = w.workspace_elements <= index.nnz();
        let occ_ok = strat.kind != sparsedist::engine::StrategyKind::BalancedHash || w.peak_occupancy() <= 0.5;
        ok &= staging_ok && occ_ok;
        notes.push(format!(
            "{}(slots {}): staged {} <= nnz(B) {}, peak occupancy {:.1}%",
            strat.kind,
            w.accumulator_slots,
            w.workspace_elements,
            index.nnz(),
            100.0 * w.peak_occupancy()
        ));
    }
    (ok, notes.join("; "))
}

fn c8_knn() -> Outcome {
    let t = Instant::now();
    let x = generate(&GenSpec {
        n_rows: 2000,
        n_cols: 1000,
        degrees: DegreeDist::Zipf { s: 1.1, max_deg: 500 },
        values: ValueDist::Uniform01,
        seed: 8,
    })
    .unwrap();
    let k = 10;
    let spec = metric_registry("cosine", MetricParams::default()).unwrap();
    let runs: Vec<_> = [64, 500, 2000]
        .into_iter()
        .map(|b| kneighbors(&x, &x, k, &spec, &ExecutionStrategy::auto(), b).unwrap())
        .collect();
    let batch_invariant = runs.windows(2).all(|w| w[0] == w[1]);

    let dx = densify(&x).unwrap();
    let mut index_mismatch = 0;
    let mut dist_err: f64 = 0.0;
    for q in 0..x.n_rows() {
        let full: Vec<f64> = (0..x.n_rows())
            .map(|j| oracle_distance(dx.row(q), dx.row(j), "cosine", None).unwrap())
            .collect();
        let mut order: Vec<usize> = (0..full.len()).collect();
        order.sort_by(|&a, &b| full[a].total_cmp(&full[b]).then(a.cmp(&b)));
        let got_i = runs[0].indices_row(q);
        let got_d = runs[0].distances_row(q);
        for pos in 0..k {
            let (g, w) = (got_i[pos], order[pos]);
            dist_err = dist_err.max((got_d[pos] - full[w]).abs());
            // A different index is acceptable only as a tie.
            if g != w && (full[g] - full[w]).abs() > 1e-9 {
                index_mismatch += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        batch_invariant && index_mismatch == 0 && dist_err <= 1e-9 && secs < 120.0,
        format!(
            "batches {{64, 500, 2000}} identical: {batch_invariant}, index mismatches {index_mismatch}, \
             max distance err {dist_err:.2e}, {secs:.1}s"
        ),
    )
}

fn c9_performance() -> Outcome {
    let spec = GenSpec {
        n_rows: 10_000,
        n_cols: 10_000,
        degrees: DegreeDist::Uniform(50),
        values: ValueDist::Uniform01,
        seed: 9,
    };
    let mut cfg = RunConfig::new(InputSource::Generated(spec), "manhattan");
    cfg.query_rows = Some(200);
    cfg.repeat = 3;
    let report = run_bench(&cfg).unwrap();
    let json = serde_json::to_string_pretty(&report).unwrap();
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance_bench.json");
    std::fs::write(&path, &json).unwrap();

    let naive = report.run("naive").unwrap().best_seconds;
    let best_balanced = ["dense", "hash"]
        .iter()
        .map(|s| report.run(s).unwrap().best_seconds)
        .fold(f64::INFINITY, f64::min);
    let speedup = naive / best_balanced;
    let times: Vec<String> = report
        .runs
        .iter()
        .map(|r| format!("{} {:.3}s", r.strategy, r.best_seconds))
        .collect();
    (
        speedup >= 1.5 && report.checksums_agree(),
        format!(
            "200 queries x 10k rows, {}; speedup {speedup:.2}x, checksums agree: {}; report {}",
            times.join(", "),
            report.checksums_agree(),
            path.display()
        ),
    )
}

fn c10_tropical() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let s = Semiring::tropical_min_plus();
    let mut mismatches = 0;
    for _ in 0..20 {
        let rand_matrix = |rng: &mut ChaCha8Rng| {
            let density = rng.random_range(0.2..0.8);
            let mut triplets = Vec::new();
            for r in 0..10 {
                for c in 0..10 {
                    if rng.random::<f64>() < density {
                        triplets.push((r, c, rng.random_range(1..100) as f64 / 4.0));
                    }
                }
            }
            CsrMatrix::from_triplets(10, 10, triplets).unwrap()
        };
        let a = rand_matrix(&mut rng);
        let b = rand_matrix(&mut rng);
        let want = oracle_min_plus(&densify(&a).unwrap(), &densify(&b).unwrap());
        for strat in strategies().into_iter().chain([ExecutionStrategy::hash(4)]) {
            let (got, _) = pairwise_generalized(&a, &b, &s, &strat).unwrap();
            mismatches += got.as_slice().iter().zip(&want).filter(|(g, w)| g != w).count();
        }
    }
    (mismatches == 0, format!("20 instances x 4 strategies, {mismatches} cells differ"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("golden two-pass manhattan", c1_disjoint_manhattan),
        ("oracle equivalence, all metrics", c2_oracle_suite),
        ("strategy cross-equivalence", c3_strategy_equivalence),
        ("two-pass union decomposition", c4_two_pass),
        ("expanded vs exhaustive euclidean", c5_expanded_vs_exhaustive),
        ("metric axioms", c6_axioms),
        ("workspace accounting", c7_workspace),
        ("knn end to end", c8_knn),
        ("balanced beats naive", c9_performance),
        ("tropical min-plus", c10_tropical),
    ];
    let mut failures = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(outcome) => outcome,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {name} ({detail})", n + 1);
        if !pass {
            failures.push(n + 1);
        }
    }
    assert!(failures.is_empty(), "failing criteria: {failures:?}");
}

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sparsedist::bench::{run_bench, BenchReport, InputSource, RunConfig};
use sparsedist::engine::{ExecutionStrategy, StrategyKind};
use sparsedist::error::{Error, Result};
use sparsedist::io::{
    generate, read_matrix_market, write_matrix_market, write_output, write_output_to, DegreeDist,
    GenSpec, Output, OutputFormat, ValueDist, WriteOptions,
};
use sparsedist::knn::{kneighbors, BatchPlan, DEFAULT_MEMORY_BUDGET};
use sparsedist::metrics::{compute_distances, KlMode, Metric, MetricParams, MetricSpec};
use sparsedist::verify::{verify_metric, InstanceBounds};

const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "sparsedist", version, about = "Pairwise distances and kNN on sparse matrices")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, env = "WORKERS", global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise distance matrix between the rows of two matrices.
    Dist(DistArgs),
    /// k nearest index rows for every query row.
    Knn(KnnArgs),
    /// Time kNN queries across strategies.
    Bench(BenchArgs),
    /// Write a synthetic matrix in Matrix Market format.
    Gen(GenArgs),
    /// Check the engine against the dense oracle on random inputs.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct MetricArgs {
    #[arg(long)]
    metric: String,
    /// Minkowski order.
    #[arg(long)]
    p: Option<f64>,
    /// Saturate KL cells with unsupported columns instead of failing.
    #[arg(long)]
    kl_permissive: bool,
}

impl MetricArgs {
    fn params(&self) -> MetricParams {
        MetricParams {
            p: self.p,
            kl_mode: if self.kl_permissive {
                KlMode::Permissive
            } else {
                KlMode::Strict
            },
        }
    }

    fn spec(&self) -> Result<MetricSpec> {
        MetricSpec::new(self.metric.parse()?, self.params())
    }
}

#[derive(Args)]
struct StrategyArgs {
    /// auto, naive, dense or hash.
    #[arg(long, default_value = "auto")]
    strategy: String,
    /// Hash accumulator slots.
    #[arg(long)]
    capacity: Option<usize>,
    #[arg(long)]
    load_factor: Option<f64>,
}

impl StrategyArgs {
    fn strategy(&self) -> Result<ExecutionStrategy> {
        let kind: StrategyKind = self.strategy.parse()?;
        let mut s = ExecutionStrategy::from_kind(kind);
        if let Some(c) = self.capacity {
            s.accumulator_capacity = Some(c);
        }
        if let Some(l) = self.load_factor {
            s = s.with_load_factor(l);
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; inferred from the output extension by default.
    #[arg(long)]
    format: Option<String>,
    /// Write a header line in CSV output.
    #[arg(long)]
    header: bool,
}

impl OutArgs {
    fn emit(&self, result: Output<'_>) -> Result<()> {
        let format = match (&self.format, &self.out) {
            (Some(f), _) => f.parse()?,
            (None, Some(p)) => OutputFormat::from_path(p),
            (None, None) => OutputFormat::Csv,
        };
        let opts = WriteOptions {
            format,
            header: self.header,
        };
        match &self.out {
            Some(path) => write_output(result, path, opts),
            None => write_output_to(result, opts, io::stdout().lock()),
        }
    }
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long)]
    input: PathBuf,
    /// Second operand; defaults to `--input`.
    #[arg(long)]
    input_b: Option<PathBuf>,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct KnnArgs {
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    metric: MetricArgs,
    /// Index matrix.
    #[arg(long)]
    input: PathBuf,
    /// Query matrix; defaults to the index itself.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Query rows per batch; sized from a memory budget by default.
    #[arg(long)]
    batch_rows: Option<usize>,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct GenParams {
    #[arg(long, default_value_t = 10_000)]
    rows: usize,
    #[arg(long, default_value_t = 10_000)]
    cols: usize,
    /// uniform:D, zipf:S:MAX_DEG or density:P.
    #[arg(long, default_value = "uniform:50")]
    degree_dist: String,
    /// uniform, tfidf or binary.
    #[arg(long, default_value = "uniform")]
    values: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenParams {
    fn spec(&self) -> Result<GenSpec> {
        Ok(GenSpec {
            n_rows: self.rows,
            n_cols: self.cols,
            degrees: self.degree_dist.parse::<DegreeDist>()?,
            values: self.values.parse::<ValueDist>()?,
            seed: self.seed,
        })
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "manhattan")]
    metric: String,
    #[arg(long)]
    p: Option<f64>,
    /// Benchmark this file instead of a generated matrix.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    gen: GenParams,
    /// Comma-separated strategies.
    #[arg(long, default_value = "naive,dense,hash", value_delimiter = ',')]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Query only the first N rows.
    #[arg(long)]
    query_rows: Option<usize>,
    #[arg(long)]
    batch_rows: Option<usize>,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    gen: GenParams,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// A metric name or `all`.
    #[arg(long)]
    metric: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 40)]
    max_rows: usize,
    #[arg(long, default_value_t = 32)]
    max_cols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn dist(args: DistArgs) -> Result<u8> {
    let spec = args.metric.spec()?;
    let strat = args.strategy.strategy()?;
    let a = read_matrix_market(&args.input)?;
    let b = match &args.input_b {
        Some(p) => read_matrix_market(p)?,
        None => a.clone(),
    };
    let run = compute_distances(&a, &b, &spec, &strat)?;
    args.out.emit(Output::Distances(&run.distances))?;
    Ok(0)
}

fn knn(args: KnnArgs) -> Result<u8> {
    let spec = args.metric.spec()?;
    let strat = args.strategy.strategy()?;
    let index = read_matrix_market(&args.input)?;
    let queries = match &args.queries {
        Some(p) => read_matrix_market(p)?,
        None => index.clone(),
    };
    let batch = args.batch_rows.unwrap_or_else(|| {
        BatchPlan::from_memory_budget(queries.n_rows(), index.n_rows(), DEFAULT_MEMORY_BUDGET)
            .batch_rows
    });
    let result = kneighbors(&index, &queries, args.k, &spec, &strat, batch)?;
    args.out.emit(Output::Neighbors(&result))?;
    Ok(0)
}

fn print_bench(report: &BenchReport) {
    println!(
        "{} on {}x{} (nnz {}, degree min/mean/max {}/{:.1}/{}), {} queries, k={}, {} workers",
        report.metric,
        report.n_rows,
        report.n_cols,
        report.nnz,
        report.degrees.min,
        report.degrees.mean,
        report.degrees.max,
        report.n_queries,
        report.k,
        report.workers,
    );
    println!("load {:.3}s", report.load_seconds);
    println!(
        "{:<8} {:>10} {:>9} {:>9} {:>9} {:>9} {:>9}  checksum",
        "strategy", "best[s]", "norms", "pass1", "pass2", "expand", "topk"
    );
    for r in &report.runs {
        println!(
            "{:<8} {:>10.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}  {}",
            r.strategy,
            r.best_seconds,
            r.phases.norms,
            r.phases.pass1,
            r.phases.pass2,
            r.phases.expansion,
            r.topk_seconds,
            &r.checksum[..16],
        );
    }
}

fn bench(args: BenchArgs) -> Result<u8> {
    let input = match &args.input {
        Some(p) => InputSource::File(p.clone()),
        None => InputSource::Generated(args.gen.spec()?),
    };
    let mut config = RunConfig::new(input, &args.metric);
    config.params = MetricParams {
        p: args.p,
        ..Default::default()
    };
    config.strategies = args
        .strategies
        .iter()
        .map(|s| s.trim().parse().map(ExecutionStrategy::from_kind))
        .collect::<Result<_>>()?;
    config.k = args.k;
    config.query_rows = args.query_rows;
    config.batch_rows = args.batch_rows;
    config.repeat = args.repeat;

    let report = run_bench(&config)?;
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(path) = &args.out {
        std::fs::write(path, format!("{json}\n"))?;
    }
    if args.json {
        println!("{json}");
    } else {
        print_bench(&report);
    }
    Ok(0)
}

fn gen(args: GenArgs) -> Result<u8> {
    let m = generate(&args.gen.spec()?)?;
    write_matrix_market(&m, &args.out)?;
    eprintln!(
        "wrote {}x{} matrix with {} nonzeros to {}",
        m.n_rows(),
        m.n_cols(),
        m.nnz(),
        args.out.display()
    );
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<u8> {
    let metrics: Vec<Metric> = if args.metric.eq_ignore_ascii_case("all") {
        Metric::ALL.to_vec()
    } else {
        vec![args.metric.parse()?]
    };
    if args.max_rows == 0 || args.max_cols == 0 {
        return Err(Error::InvalidParam("--max-rows and --max-cols must be positive".into()));
    }
    let bounds = InstanceBounds {
        max_rows: args.max_rows,
        max_cols: args.max_cols,
        ..InstanceBounds::default()
    };
    let mut all_passed = true;
    let mut stdout = io::stdout().lock();
    for metric in metrics {
        let p = match (metric, args.p) {
            (Metric::Minkowski, None) => Some(3.0),
            (_, p) => p,
        };
        let report = verify_metric(metric, MetricParams { p, ..Default::default() }, args.trials, &bounds, args.seed)?;
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        writeln!(
            stdout,
            "{verdict} {:<14} trials={} cells={} max_abs_err={:.3e}",
            report.metric, report.trials, report.cells, report.max_abs_err
        )?;
        if let Some((trial, strat, i, j, got, want)) = &report.first_failure {
            writeln!(
                stdout,
                "     first mismatch: trial {trial}, {strat}, cell ({i}, {j}): got {got}, want {want}"
            )?;
        }
        all_passed &= report.passed();
    }
    Ok(if all_passed { 0 } else { EXIT_VERIFY_FAILED })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Dist(a) => dist(a),
        Command::Knn(a) => knn(a),
        Command::Bench(a) => bench(a),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: worker count must be at least 1");
            return ExitCode::from(1);
        }
        pool = pool.num_threads(w);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `treesum`: generate, analyze, verify, prune and benchmark prefix-sum
//! forests.
//!
//! Exit codes: 0 on success, 1 on a verification failure, 2 on usage
//! errors (bad flags, malformed inputs).

use std::fmt::Write as _;
use std::fs;
use std::hint::black_box;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treesum::encoding::parity_set_walk;
use treesum::prune::greedy_prune_with;
use treesum::weights::{is_power_of_3, weight_report_with};
use treesum::{
    build_fenwick, build_sierpinski, format_ratio, parity_set, parity_sets_oracle, parse_trace,
    update_set, Boundary, EncodedArray, Forest, ForestError, Mode, NaiveArray, TraceOp,
};

#[derive(Parser)]
#[command(
    name = "treesum",
    version,
    about = "Fenwick and Sierpinski prefix-sum forests: generate, stats, verify, prune, bench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a forest and print it as JSON, DOT, or an edge list.
    Generate {
        #[arg(long, value_enum)]
        structure: Structure,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write to a file instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Per-node weights with exact average and bounds.
    Stats {
        #[arg(long, value_enum)]
        structure: Structure,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        /// Emit CSV rows (N,j,weight,bound) instead of the summary.
        #[arg(long)]
        csv: bool,
        /// Prefix convention used for the weights.
        #[arg(long, value_enum, default_value_t = BoundaryArg::Inclusive)]
        boundary: BoundaryArg,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check structure, query sets, weight bounds, and monotonicity.
    Verify {
        /// Size range `lo..hi` (inclusive) or a single size, within 1..2187.
        #[arg(long)]
        sizes: Option<SizeRange>,
        /// Validate a user-supplied forest (canonical JSON) instead.
        #[arg(long)]
        forest_file: Option<PathBuf>,
        /// Replay an operation trace against the encoded array and the
        /// naive oracle; prints one value per P line.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Value domain for trace replay.
        #[arg(long, value_enum, default_value_t = ModeArg::Bit)]
        mode: ModeArg,
        /// Forest to replay the trace on (with --size), unless
        /// --forest-file provides one.
        #[arg(long, value_enum)]
        structure: Option<Structure>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: Option<u64>,
    },
    /// Greedy edge pruning; prints the deletion report as JSON.
    Prune {
        #[arg(long, value_enum)]
        structure: Structure,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        /// Prefix convention for the average weight being minimized.
        #[arg(long, value_enum, default_value_t = BoundaryArg::Exclusive)]
        boundary: BoundaryArg,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Time updates and prefix sums and count touched nodes per op.
    Bench {
        #[arg(long, value_enum, value_delimiter = ',',
              default_values_t = [BenchStructure::Naive, BenchStructure::Fenwick, BenchStructure::Sierpinski])]
        structures: Vec<BenchStructure>,
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..),
              default_values_t = [81u64, 729, 6561])]
        sizes: Vec<u64>,
        /// Operations per structure/size pair.
        #[arg(long, default_value_t = 1000)]
        ops: u64,
        /// Workload seed; the op sequence is deterministic given the seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Structure {
    Sierpinski,
    Fenwick,
}

impl Structure {
    fn build(self, n: usize) -> Forest {
        match self {
            Structure::Sierpinski => build_sierpinski(n).expect("n >= 1"),
            Structure::Fenwick => build_fenwick(n).expect("n >= 1"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
    Edges,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundaryArg {
    Inclusive,
    Exclusive,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Boundary {
        match b {
            BoundaryArg::Inclusive => Boundary::Inclusive,
            BoundaryArg::Exclusive => Boundary::Exclusive,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Bit,
    Count,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Bit => Mode::Bit,
            ModeArg::Count => Mode::Count,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchStructure {
    Naive,
    Fenwick,
    Sierpinski,
}

const MAX_VERIFY_SIZE: usize = 2187;

#[derive(Clone, Copy, Debug)]
struct SizeRange {
    lo: usize,
    hi: usize,
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (
                a.parse::<usize>().map_err(|_| format!("bad size {a:?}"))?,
                b.parse::<usize>().map_err(|_| format!("bad size {b:?}"))?,
            ),
            None => {
                let n = s.parse::<usize>().map_err(|_| format!("bad size {s:?}"))?;
                (n, n)
            }
        };
        if lo < 1 || hi < lo || hi > MAX_VERIFY_SIZE {
            return Err(format!(
                "size range must satisfy 1 <= lo <= hi <= {MAX_VERIFY_SIZE}"
            ));
        }
        Ok(SizeRange { lo, hi })
    }
}

enum CmdError {
    Usage(String),
    Verification(String),
}

fn usage(msg: impl Into<String>) -> CmdError {
    CmdError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), CmdError> {
    match command {
        Command::Generate {
            structure,
            size,
            format,
            output,
        } => cmd_generate(structure, size as usize, format, output),
        Command::Stats {
            structure,
            size,
            csv,
            boundary,
            output,
        } => cmd_stats(structure, size as usize, csv, boundary.into(), output),
        Command::Verify {
            sizes,
            forest_file,
            trace,
            mode,
            structure,
            size,
        } => cmd_verify(sizes, forest_file, trace, mode.into(), structure, size),
        Command::Prune {
            structure,
            size,
            boundary,
            output,
        } => cmd_prune(structure, size as usize, boundary.into(), output),
        Command::Bench {
            structures,
            sizes,
            ops,
            seed,
        } => cmd_bench(&structures, &sizes, ops as usize, seed),
    }
}

fn write_out(output: Option<PathBuf>, content: &str) -> Result<(), CmdError> {
    match output {
        Some(path) => fs::write(&path, content)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_generate(
    structure: Structure,
    size: usize,
    format: Format,
    output: Option<PathBuf>,
) -> Result<(), CmdError> {
    let forest = structure.build(size);
    let content = match format {
        Format::Json => {
            let mut s = forest.to_json();
            s.push('\n');
            s
        }
        Format::Dot => forest.to_dot(),
        Format::Edges => {
            let mut s = String::new();
            for (p, c) in forest.edges() {
                let _ = writeln!(s, "{p} {c}");
            }
            s
        }
    };
    write_out(output, &content)
}

fn cmd_stats(
    structure: Structure,
    size: usize,
    csv: bool,
    boundary: Boundary,
    output: Option<PathBuf>,
) -> Result<(), CmdError> {
    let forest = structure.build(size);
    let report = weight_report_with(&forest, boundary);
    let content = if csv {
        let mut buf = Vec::new();
        report
            .write_csv(&mut buf)
            .map_err(|e| usage(format!("cannot emit CSV: {e}")))?;
        String::from_utf8(buf).expect("CSV is ASCII")
    } else {
        let mut s = format!(
            "max={} avg={} bound={} min_avg={:.6}\n",
            report.max_weight,
            format_ratio(&report.avg_weight),
            report.bound,
            report.min_avg
        );
        s.push_str("weights:");
        for w in &report.weights {
            let _ = write!(s, " {w}");
        }
        s.push('\n');
        s
    };
    write_out(output, &content)
}

fn cmd_prune(
    structure: Structure,
    size: usize,
    boundary: Boundary,
    output: Option<PathBuf>,
) -> Result<(), CmdError> {
    let forest = structure.build(size);
    let report = greedy_prune_with(&forest, boundary);
    let mut content = report.to_json();
    content.push('\n');
    write_out(output, &content)
}

fn cmd_verify(
    sizes: Option<SizeRange>,
    forest_file: Option<PathBuf>,
    trace: Option<PathBuf>,
    mode: Mode,
    structure: Option<Structure>,
    size: Option<u64>,
) -> Result<(), CmdError> {
    if let Some(trace_path) = trace {
        let forest = match (&forest_file, structure, size) {
            (Some(path), _, _) => load_forest_file(path)?,
            (None, Some(structure), Some(size)) => structure.build(size as usize),
            _ => {
                return Err(usage(
                    "--trace needs a forest: pass --forest-file or --structure with --size",
                ))
            }
        };
        return replay_trace(&trace_path, &forest, mode);
    }

    if let Some(path) = forest_file {
        let forest = load_forest_file(&path)?;
        check_oracle_equivalence(&forest, "forest file")?;
        println!(
            "forest file ok: nodes={} roots={}",
            forest.size(),
            forest.roots().len()
        );
        println!("verify: PASS");
        return Ok(());
    }

    let range = sizes.ok_or_else(|| usage("verify needs --sizes, --forest-file, or --trace"))?;
    verify_range(range)
}

fn load_forest_file(path: &PathBuf) -> Result<Forest, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    match Forest::from_json(&text) {
        Ok(forest) => Ok(forest),
        Err(ForestError::Json(e)) => Err(usage(format!("{}: {e}", path.display()))),
        Err(violation) => Err(CmdError::Verification(format!(
            "verify: FAIL {}: {violation}",
            path.display()
        ))),
    }
}

fn replay_trace(path: &PathBuf, forest: &Forest, mode: Mode) -> Result<(), CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let ops = parse_trace(&text).map_err(|e| usage(e.to_string()))?;
    let mut array = EncodedArray::zeros(forest, mode);
    let mut naive = NaiveArray::new(forest.size(), mode);
    let mut queries = 0usize;
    for op in &ops {
        match *op {
            TraceOp::Update { index, delta } => {
                array
                    .apply_update(index, delta)
                    .map_err(|e| usage(format!("trace update: {e}")))?;
                naive
                    .update(index, delta)
                    .map_err(|e| usage(format!("trace update: {e}")))?;
            }
            TraceOp::Prefix { index, boundary } => {
                let got = array
                    .prefix_sum(index, boundary)
                    .map_err(|e| usage(format!("trace query: {e}")))?;
                let expected = naive.prefix(index, boundary).expect("index checked above");
                println!("{got}");
                if got != expected {
                    return Err(CmdError::Verification(format!(
                        "verify: FAIL trace query {index}: encoded {got} != naive {expected}"
                    )));
                }
                queries += 1;
            }
        }
    }
    eprintln!("trace: PASS ({} ops, {queries} queries)", ops.len());
    Ok(())
}

fn check_oracle_equivalence(forest: &Forest, label: &str) -> Result<(), CmdError> {
    for boundary in [Boundary::Inclusive, Boundary::Exclusive] {
        let oracle = parity_sets_oracle(forest, boundary)
            .map_err(|e| CmdError::Verification(format!("verify: FAIL {label}: {e}")))?;
        for (j, expected) in oracle.iter().enumerate() {
            let direct = parity_set(forest, j, boundary).expect("index in range");
            if direct != *expected {
                return Err(CmdError::Verification(format!(
                    "verify: FAIL {label}: parity set at j={j} ({boundary:?}) is {direct:?}, oracle says {expected:?}"
                )));
            }
        }
    }
    Ok(())
}

fn verify_range(range: SizeRange) -> Result<(), CmdError> {
    let SizeRange { lo, hi } = range;
    // Sierpinski weight tables for 1..=hi back the bound and monotonicity
    // checks; building them once keeps the whole range pass linear-ish.
    let tables: Vec<Vec<usize>> = (1..=hi)
        .map(|n| {
            treesum::weight_table(
                &build_sierpinski(n).expect("n >= 1"),
                Boundary::Inclusive,
            )
        })
        .collect();

    for n in lo..=hi {
        let sierpinski = build_sierpinski(n).expect("n >= 1");
        let fenwick = build_fenwick(n).expect("n >= 1");
        for (name, forest) in [("sierpinski", &sierpinski), ("fenwick", &fenwick)] {
            forest.validate().map_err(|e| {
                CmdError::Verification(format!("verify: FAIL {name} N={n}: {e}"))
            })?;
        }
        // The exact GF(2) oracle is cubic; run it where that stays cheap.
        let run_oracle = n <= 243 || is_power_of_3(n) || lo == hi;
        if run_oracle {
            check_oracle_equivalence(&sierpinski, &format!("sierpinski N={n}"))?;
            check_oracle_equivalence(&fenwick, &format!("fenwick N={n}"))?;
        }
        let weights = &tables[n - 1];
        let report = weight_report_with(&sierpinski, Boundary::Inclusive);
        let fen_max = treesum::weight_table(&fenwick, Boundary::Inclusive)
            .into_iter()
            .max()
            .expect("n >= 1");
        println!(
            "N={n}: ok nodes={n} sierpinski min={} max={} avg={} bound={} fenwick max={} oracle={}",
            weights.iter().min().expect("n >= 1"),
            report.max_weight,
            format_ratio(&report.avg_weight),
            report.bound,
            fen_max,
            if run_oracle { "checked" } else { "skipped" },
        );
    }

    // Worst-case bound, with equality at powers of 3.
    for n in lo..=hi {
        let bound = treesum::ceil_log3(n) + 1;
        let exact = is_power_of_3(n);
        for (j, &w) in tables[n - 1].iter().enumerate() {
            if w > bound || (exact && w != bound) {
                return Err(CmdError::Verification(format!(
                    "verify: FAIL weight bound at N={n} j={j}: w={w}, bound={bound}"
                )));
            }
        }
    }

    // Per-node monotonicity across the requested range.
    for n in lo.max(2)..=hi {
        let (before, after) = (&tables[n - 2], &tables[n - 1]);
        for (j, (&b, &a)) in before.iter().zip(after).enumerate() {
            if a < b {
                return Err(CmdError::Verification(format!(
                    "verify: FAIL monotonicity at j={j}: w_{}={b} > w_{n}={a}",
                    n - 1
                )));
            }
        }
    }

    println!("verify: PASS sizes {lo}..{hi}");
    Ok(())
}

fn cmd_bench(
    structures: &[BenchStructure],
    sizes: &[u64],
    ops: usize,
    seed: u64,
) -> Result<(), CmdError> {
    println!(
        "{:<11} {:>9} {:>7} {:>14} {:>14} {:>13} {:>12}",
        "structure", "n", "ops", "update_ns/op", "prefix_ns/op", "touched_mean", "touched_max"
    );
    for &structure in structures {
        for &size in sizes {
            let n = size as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let indices: Vec<usize> = (0..ops).map(|_| rng.random_range(0..n)).collect();
            let row = match structure {
                BenchStructure::Naive => bench_naive(n, &indices),
                BenchStructure::Fenwick => bench_forest(&build_fenwick(n).expect("n >= 1"), &indices),
                BenchStructure::Sierpinski => {
                    bench_forest(&build_sierpinski(n).expect("n >= 1"), &indices)
                }
            };
            let name = match structure {
                BenchStructure::Naive => "naive",
                BenchStructure::Fenwick => "fenwick",
                BenchStructure::Sierpinski => "sierpinski",
            };
            println!(
                "{:<11} {:>9} {:>7} {:>14.1} {:>14.1} {:>13.3} {:>12}",
                name, n, ops, row.update_ns, row.prefix_ns, row.touched_mean, row.touched_max
            );
        }
    }
    Ok(())
}

struct BenchRow {
    update_ns: f64,
    prefix_ns: f64,
    touched_mean: f64,
    touched_max: usize,
}

fn bench_naive(n: usize, indices: &[usize]) -> BenchRow {
    let mut array = NaiveArray::new(n, Mode::Bit);
    let start = Instant::now();
    for &j in indices {
        array.update(j, 1).expect("index in range");
    }
    let update_ns = per_op_ns(start, indices.len());
    let start = Instant::now();
    let mut sink = 0i64;
    for &j in indices {
        sink ^= array.prefix(j, Boundary::Inclusive).expect("index in range");
    }
    black_box(sink);
    let prefix_ns = per_op_ns(start, indices.len());
    // An op pair at j writes one cell and reads the prefix 0..=j.
    let touched: Vec<usize> = indices.iter().map(|&j| j + 1).collect();
    BenchRow {
        update_ns,
        prefix_ns,
        touched_mean: mean(&touched),
        touched_max: touched.iter().copied().max().unwrap_or(0),
    }
}

fn bench_forest(forest: &Forest, indices: &[usize]) -> BenchRow {
    let mut array = EncodedArray::zeros(forest, Mode::Bit);
    let start = Instant::now();
    for &j in indices {
        array.apply_update(j, 1).expect("index in range");
    }
    let update_ns = per_op_ns(start, indices.len());
    let start = Instant::now();
    let mut sink = 0i64;
    for &j in indices {
        sink ^= array
            .prefix_sum(j, Boundary::Inclusive)
            .expect("index in range");
    }
    black_box(sink);
    let prefix_ns = per_op_ns(start, indices.len());
    // Distinct stored values touched by the update+query pair at j.
    let touched: Vec<usize> = indices
        .iter()
        .map(|&j| {
            let b = update_set(forest, j).expect("index in range");
            let p = parity_set_walk(forest, j, Boundary::Inclusive).expect("index in range");
            b.union(&p).len()
        })
        .collect();
    BenchRow {
        update_ns,
        prefix_ns,
        touched_mean: mean(&touched),
        touched_max: touched.iter().copied().max().unwrap_or(0),
    }
}

fn per_op_ns(start: Instant, ops: usize) -> f64 {
    start.elapsed().as_nanos() as f64 / ops.max(1) as f64
}

fn mean(values: &[usize]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<usize>() as f64 / values.len() as f64
}

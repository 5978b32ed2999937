use clap::{Args, Parser, Subcommand, ValueEnum};
use csg_cli::records::{aggregate, parse_runs, write_runs};
use csg_cli::sweep::{run_sweep, status_name, thread_cap, Algo, SweepSpec};
use csg_cli::trace::write_trace;
use csg_core::baselines::{brute_force_solve, dp_solve};
use csg_core::values::{DistributionKind, DistributionSpec, ValueTable};
use csg_core::{solve, Constraints, SearchConfig, SearchPolicy, SolveStatus};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

/// Exit code when a solve stops on its time limit.
const EXIT_TIME_LIMITED: i32 = 3;

#[derive(Parser)]
#[command(
    name = "csg",
    about = "Coalition structure generation: instance generator, anytime solver, and benchmark harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance file.
    Gen(GenArgs),
    /// Solve a single instance and report the result.
    Solve(SolveArgs),
    /// Run a benchmark sweep and write run/summary CSVs.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Normal,
    Ndcs,
}

impl From<DistArg> for DistributionKind {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Uniform => DistributionKind::Uniform,
            DistArg::Normal => DistributionKind::Normal,
            DistArg::Ndcs => DistributionKind::Ndcs,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Bin,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Ip,
    Dp,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    MaxUpperBound,
    SmallestPromising,
}

impl From<PolicyArg> for SearchPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::MaxUpperBound => SearchPolicy::MaxUpperBound,
            PolicyArg::SmallestPromising => SearchPolicy::SmallestPromising,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Number of agents (1..=30).
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum)]
    dist: DistArg,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "bin")]
    format: FormatArg,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (binary .csgv or the CSV text form).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Acceptable worst-case bound; 1 demands a proven optimum.
    #[arg(long, default_value_t = 1.0)]
    beta_star: f64,
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Trace CSV path; defaults to `<in>.trace.csv`. Written for algo=ip.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "max-upper-bound")]
    policy: PolicyArg,
    /// Only consider structures with exactly this many coalitions.
    #[arg(long)]
    parts: Option<u32>,
    /// Only consider coalitions up to this size.
    #[arg(long)]
    max_size: Option<u32>,
}

#[derive(Args)]
struct BenchArgs {
    /// Inclusive range of agent counts, e.g. 10..14.
    #[arg(long)]
    n_range: String,
    /// Comma-separated distributions, e.g. uniform,normal,ndcs.
    #[arg(long)]
    dists: String,
    /// Comma-separated explicit seeds, e.g. 0,1,2.
    #[arg(long, conflicts_with = "seed_count")]
    seeds: Option<String>,
    /// Shorthand for seeds 0..count.
    #[arg(long)]
    seed_count: Option<u64>,
    /// Comma-separated algorithms out of ip,dp,brute.
    #[arg(long)]
    algos: String,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    beta_star: f64,
    #[arg(long)]
    time_limit_ms: Option<u64>,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
    };
    std::process::exit(code);
}

fn fail(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    1
}

fn cmd_gen(args: GenArgs) -> i32 {
    let spec = DistributionSpec {
        kind: args.dist.into(),
        seed: args.seed,
    };
    let table = match ValueTable::generate(args.n, spec) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let bytes = match args.format {
        FormatArg::Bin => {
            let mut bytes = Vec::new();
            if let Err(e) = table.write_to(&mut bytes) {
                return fail(e);
            }
            bytes
        }
        FormatArg::Csv => match table.to_csv() {
            Ok(text) => text.into_bytes(),
            Err(e) => return fail(e),
        },
    };
    if let Err(e) = std::fs::write(&args.out, &bytes) {
        return fail(format!("writing {}: {e}", args.out.display()));
    }
    println!("wrote {} ({} bytes)", args.out.display(), bytes.len());
    let digest = Sha256::digest(&bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    println!("sha256: {hex}");
    0
}

fn load_instance(path: &Path) -> Result<ValueTable, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    if bytes.starts_with(b"CSGV") {
        ValueTable::read_from(bytes.as_slice()).map_err(|e| e.to_string())
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| "instance is neither binary nor UTF-8 text".to_string())?;
        ValueTable::from_csv(&text).map_err(|e| e.to_string())
    }
}

fn describe_instance(table: &ValueTable, path: &Path) -> String {
    match table.provenance() {
        Some(spec) => format!(
            "{} (n={}, {}, seed={})",
            path.display(),
            table.n(),
            spec.kind.name(),
            spec.seed
        ),
        None => format!("{} (n={}, custom values)", path.display(), table.n()),
    }
}

fn cmd_solve(args: SolveArgs) -> i32 {
    let table = match load_instance(&args.input) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    println!("instance: {}", describe_instance(&table, &args.input));

    let structure = |cs: &[csg_core::Coalition]| {
        cs.iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };

    match args.algo {
        AlgoArg::Ip => {
            let constraints =
                (args.parts.is_some() || args.max_size.is_some()).then_some(Constraints {
                    part_count: args.parts,
                    max_part_size: args.max_size,
                });
            let config = SearchConfig {
                beta_star: args.beta_star,
                policy: args.policy.into(),
                constraints,
                time_limit: args.time_limit_ms.map(Duration::from_millis),
                ..SearchConfig::default()
            };
            let t0 = Instant::now();
            let sol = solve(&table, &config, &mut ());
            let wall = t0.elapsed();

            let trace_path = args
                .trace_out
                .unwrap_or_else(|| PathBuf::from(format!("{}.trace.csv", args.input.display())));
            if let Err(e) = std::fs::write(&trace_path, write_trace(&sol.trace)) {
                return fail(format!("writing trace {}: {e}", trace_path.display()));
            }

            println!("algo: ip  beta_star: {}", args.beta_star);
            println!("status: {}", status_name(sol.status));
            println!("value: {}", sol.value);
            println!("structure: {}", structure(&sol.cs));
            if sol.beta_final.is_finite() {
                println!("beta: {}", sol.beta_final);
            } else {
                println!("beta: unavailable (best value not positive)");
            }
            println!("wall_ms: {:.3}", wall.as_secs_f64() * 1e3);
            println!("cs_examined: {}", sol.cs_examined);
            println!(
                "subspaces: searched={} pruned={} remaining={}",
                sol.subspaces_searched,
                sol.subspaces_pruned,
                sol.trace.last().map(|s| s.subspaces_remaining).unwrap_or(0)
            );
            println!("trace: {} ({} rows)", trace_path.display(), sol.trace.len());
            if sol.status == SolveStatus::TimeLimited {
                return EXIT_TIME_LIMITED;
            }
            0
        }
        AlgoArg::Dp => {
            let t0 = Instant::now();
            match dp_solve(&table) {
                Ok(sol) => {
                    println!("algo: dp");
                    println!("status: optimal");
                    println!("value: {}", sol.value);
                    println!("structure: {}", structure(&sol.cs));
                    println!("wall_ms: {:.3}", t0.elapsed().as_secs_f64() * 1e3);
                    println!("splits_evaluated: {}", sol.splits_evaluated);
                    0
                }
                Err(e) => fail(e),
            }
        }
        AlgoArg::Brute => {
            let t0 = Instant::now();
            match brute_force_solve(&table) {
                Ok((cs, value)) => {
                    println!("algo: brute");
                    println!("status: optimal");
                    println!("value: {value}");
                    println!("structure: {}", structure(&cs));
                    println!("wall_ms: {:.3}", t0.elapsed().as_secs_f64() * 1e3);
                    0
                }
                Err(e) => fail(e),
            }
        }
    }
}

fn parse_n_range(text: &str) -> Result<Vec<u32>, String> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| format!("bad range '{text}'"))?;
        let hi: u32 = hi
            .trim()
            .parse()
            .map_err(|_| format!("bad range '{text}'"))?;
        if lo == 0 || hi < lo {
            return Err(format!("bad range '{text}'"));
        }
        Ok((lo..=hi).collect())
    } else {
        let n: u32 = text
            .trim()
            .parse()
            .map_err(|_| format!("bad range '{text}'"))?;
        Ok(vec![n])
    }
}

fn parse_list<T: std::str::FromStr<Err = String>>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse())
        .collect()
}

fn cmd_bench(args: BenchArgs) -> i32 {
    let n_values = match parse_n_range(&args.n_range) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let distributions: Vec<DistributionKind> = match parse_list(&args.dists) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let algos: Vec<Algo> = match parse_list(&args.algos) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let seeds: Vec<u64> = match (&args.seeds, args.seed_count) {
        (Some(list), _) => {
            match list
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|_| format!("bad seed '{s}'"))
                })
                .collect()
            {
                Ok(v) => v,
                Err(e) => return fail(e),
            }
        }
        (None, Some(count)) => (0..count).collect(),
        (None, None) => return fail("provide --seeds or --seed-count"),
    };
    if seeds.is_empty() {
        return fail("empty seed list");
    }
    if n_values.is_empty() || distributions.is_empty() || algos.is_empty() {
        return fail("empty sweep dimension");
    }

    if let Err(e) = std::fs::create_dir_all(&args.out_dir) {
        return fail(format!("creating {}: {e}", args.out_dir.display()));
    }

    let spec = SweepSpec {
        n_values,
        distributions,
        seeds,
        algos,
        beta_star: args.beta_star,
        time_limit: args.time_limit_ms.map(Duration::from_millis),
    };
    let threads = thread_cap();
    let rows = run_sweep(&spec, threads);

    let runs_path = args.out_dir.join("runs.csv");
    let runs_text = write_runs(&rows);
    if let Err(e) = std::fs::write(&runs_path, &runs_text) {
        return fail(format!("writing {}: {e}", runs_path.display()));
    }
    // The summary is derived from the written form, so re-aggregating the
    // file reproduces it byte for byte.
    let parsed = match parse_runs(&runs_text) {
        Ok(rows) => rows,
        Err(e) => return fail(format!("internal runs round-trip: {e}")),
    };
    let summary_path = args.out_dir.join("summary.csv");
    if let Err(e) = std::fs::write(&summary_path, aggregate(&parsed)) {
        return fail(format!("writing {}: {e}", summary_path.display()));
    }

    let failures = rows.iter().filter(|r| r.status == "error").count();
    println!(
        "ran {} jobs on {} threads ({} failures)",
        rows.len(),
        threads,
        failures
    );
    println!("runs: {}", runs_path.display());
    println!("summary: {}", summary_path.display());
    0
}

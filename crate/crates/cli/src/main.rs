use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heckeval::hecke::Method;
use heckeval_cli::bench::{prime_samples, render_table, write_bench_csv, write_residual_csv, write_truncation_csv};
use heckeval_cli::fetch::{default_cache_dir, DEFAULT_ENDPOINT};
use heckeval_cli::run::render;
use heckeval_cli::{fetch_remote_coefficients, run_bench, run_eigenvalue, run_qexp, BenchSpec, CliError, CliResult, OutputFormat, RunConfig};

/// Certified Hecke eigenvalues of classical modular eigenforms.
#[derive(Parser)]
#[command(name = "eigen", version, subcommand_negates_reqs = true, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[arg(long, required = true)]
    level: Option<u64>,
    #[arg(long, required = true)]
    weight: Option<u32>,
    #[arg(long, required = true)]
    prime: Option<u64>,
    /// Accuracy target `10^-digits`.
    #[arg(long, required = true)]
    digits: Option<u32>,
    #[arg(long, default_value = "direct", value_parser = parse_method)]
    method: Method,
    /// Base point, e.g. `0+1.2i`.
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
    /// Split of the error budget between numerator and denominator.
    #[arg(long)]
    h: Option<f64>,
    /// Which eigenform of a level-one space, by real root order.
    #[arg(long)]
    embedding: Option<usize>,
    /// Coefficient file for the form.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: OutputFormat,
    /// Worker threads for the Hecke sum (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print q-expansion coefficients of a level-one eigenform.
    Qexp(QexpArgs),
    /// Time eigenvalue computations and write CSV tables.
    Bench(BenchArgs),
    /// Download newform coefficients into the cache.
    Fetch(FetchArgs),
}

#[derive(Args)]
struct QexpArgs {
    #[arg(long, default_value_t = 1)]
    level: u64,
    #[arg(long)]
    weight: u32,
    #[arg(long, default_value_t = 10)]
    terms: usize,
    #[arg(long, default_value_t = 0)]
    embedding: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// `level,weight,prime,method`; repeatable.
    #[arg(long = "row")]
    rows: Vec<String>,
    /// Runs per row; at least 5.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 3)]
    digits: u32,
    /// Timing table output.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Directory for the per-prime truncation and residual tables.
    #[arg(long)]
    figures: Option<PathBuf>,
    #[arg(long, default_value_t = 24)]
    figure_weight: u32,
    #[arg(long, default_value_t = 1000)]
    figure_max_prime: u64,
}

#[derive(Args)]
struct FetchArgs {
    /// Newform label, e.g. `2.8.a.a`.
    #[arg(long)]
    label: String,
    #[arg(long)]
    level: u64,
    #[arg(long)]
    weight: u32,
    #[arg(long, default_value = DEFAULT_ENDPOINT)]
    endpoint: String,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: heckeval::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn eigenvalue(cli: Cli) -> CliResult<String> {
    let missing = |flag: &str| CliError::Config(format!("--{flag} is required"));
    let config = RunConfig {
        level: cli.level.ok_or_else(|| missing("level"))?,
        weight: cli.weight.ok_or_else(|| missing("weight"))?,
        prime: cli.prime.ok_or_else(|| missing("prime"))?,
        digits: cli.digits.ok_or_else(|| missing("digits"))?,
        method: cli.method,
        z0: cli.z0,
        h: cli.h,
        embedding: cli.embedding,
        coeffs_path: cli.coeffs,
        output_format: cli.format,
        threads: cli.threads,
    };
    let ev = run_eigenvalue(&config)?;
    Ok(render(&ev, &config))
}

fn bench(args: BenchArgs) -> CliResult<String> {
    let specs = args.rows.iter().map(|r| r.parse()).collect::<CliResult<Vec<BenchSpec>>>()?;
    let rows = run_bench(&specs, args.repeats.max(5), args.digits);
    if let Some(path) = &args.csv {
        write_bench_csv(&rows, File::create(path)?)?;
    }
    if let Some(dir) = &args.figures {
        std::fs::create_dir_all(dir)?;
        let samples = prime_samples(args.figure_weight, 0, args.figure_max_prime, args.digits, Method::Direct)?;
        write_truncation_csv(&samples, File::create(dir.join("truncation.csv"))?)?;
        write_residual_csv(&samples, File::create(dir.join("residuals.csv"))?)?;
    }
    Ok(render_table(&rows))
}

fn fetch(args: FetchArgs) -> CliResult<String> {
    let dir = args.cache_dir.unwrap_or_else(default_cache_dir);
    let file = fetch_remote_coefficients(args.level, args.weight, &args.label, &args.endpoint, &dir)?;
    Ok(format!(
        "{}: level {} weight {}, {} coefficients cached in {}\n",
        args.label,
        file.level,
        file.weight,
        file.coefficients.len(),
        dir.display()
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        None => eigenvalue(cli),
        Some(Command::Qexp(a)) => run_qexp(a.level, a.weight, a.terms, a.embedding).map(|c| c.join("\n") + "\n"),
        Some(Command::Bench(a)) => bench(a),
        Some(Command::Fetch(a)) => fetch(a),
    };
    match out {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

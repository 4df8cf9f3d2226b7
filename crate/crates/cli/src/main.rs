//! `dsum`: build, evaluate and check summation circuits from the shell.
//!
//! Exit codes: 0 success, 1 usage, 2 malformed input, 3 overflow or scale
//! guard, 4 verification mismatch.

mod bench;
mod commands;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "dsum", version, about = "Disjoint and intersection summation circuits")]
struct Cli {
    /// Worker threads for parallel evaluation (1 keeps everything sequential).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a circuit for [n] and write it as JSON.
    Build(BuildArgs),
    /// Evaluate a circuit file on an input table.
    Eval(EvalArgs),
    /// Cross-check circuit, direct mode, baselines and oracles on random tables.
    Verify(VerifyArgs),
    /// Tabulate gate counts and build times.
    Bench(BenchArgs),
    /// Count the heaviest simple k-edge paths between two vertices.
    Kpath(KpathArgs),
    /// Permanent of a k × n matrix.
    Permanent(PermanentArgs),
    /// Precompute best feature subsets, then answer exclusion queries from stdin.
    Featsel(FeatselArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    /// Circuit file to write; stdout when neither --out, --stats nor --dot is given.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "pq")]
    pub builder: String,
    /// Print gate counts and check them against the closed form.
    #[arg(long)]
    pub stats: bool,
    /// Graphviz file to write.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// Lines `I | X : value` or `X : value`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub semiring: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the recursion on values instead of evaluating the circuit's gates.
    #[arg(long)]
    pub direct: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Check only this builder; all applicable ones by default.
    #[arg(long)]
    pub builder: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub max_b: u8,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KpathArgs {
    /// Header `n m [directed]`, then `u v w` per edge.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub directed: bool,
}

#[derive(Debug, Args)]
pub struct PermanentArgs {
    /// Header `k n`, then k rows of n entries.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value = "nat-sum")]
    pub semiring: String,
}

#[derive(Debug, Args)]
pub struct FeatselArgs {
    /// Lines `X : score`.
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    /// Number of features; defaults to one past the largest index in the scores.
    #[arg(long)]
    pub n: Option<u64>,
}

/// A failed run, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Numeric(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Numeric(m) | Failure::Mismatch(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<dsum_core::Error> for Failure {
    fn from(e: dsum_core::Error) -> Self {
        use dsum_core::Error;
        let text = e.to_string();
        match e {
            Error::InvalidParameter(_) => Failure::Usage(text),
            Error::Format(_) | Error::InvalidKey(_) => Failure::Input(text),
            Error::Overflow(_) | Error::ScaleGuard(_) => Failure::Numeric(text),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("dsum: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = cli.threads.unwrap_or(1);
    if threads == 0 {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    let parallel = threads > 1;
    match cli.command {
        Command::Build(args) => commands::build(&args),
        Command::Eval(args) => commands::eval(&args, parallel),
        Command::Verify(args) => verify::run(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Kpath(args) => commands::kpath(&args, parallel),
        Command::Permanent(args) => commands::permanent(&args, parallel),
        Command::Featsel(args) => commands::featsel(&args, parallel),
    }
}

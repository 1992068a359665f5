//! `lpdos`: dyadic sequences, spectra and IDS continuity reports.

mod commands;
mod model;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use model::{parse_levels, ModelArgs};

#[derive(Parser)]
#[command(
    name = "lpdos",
    version,
    about = "Limit-periodic Schrödinger operators and their integrated density of states"
)]
struct Cli {
    /// Cap on worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory for cached spectra.
    #[arg(long, global = true, env = "LPDOS_CACHE_DIR")]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print λ^{(m)}_n with its bit pattern for a range of n.
    Sequence {
        #[arg(short = 'm', long = "depth")]
        depth: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        start: i64,
        /// Exclusive end; defaults to one period.
        #[arg(long, allow_hyphen_values = true)]
        end: Option<i64>,
    },
    /// Certified distality margins against 1/(16|k|).
    Distal {
        #[arg(long, default_value_t = 16)]
        kmax: i64,
        #[arg(long, default_value_t = 20)]
        depth: u32,
        /// Also list negative shifts.
        #[arg(long)]
        symmetric: bool,
    },
    /// Landing index of a dyadic interval, checked over a window of sites.
    Landing {
        #[arg(short = 'm', long = "depth")]
        depth: u32,
        #[arg(short = 'j', long)]
        index: u64,
        /// Window length in periods.
        #[arg(long, default_value_t = 3)]
        periods: i64,
    },
    /// Closed-form lattice sums against brute force.
    Lattice {
        #[arg(short = 'd', long = "base")]
        base: f64,
        /// Lattice spacing for a single sum.
        #[arg(long, conflicts_with = "depth")]
        delta: Option<f64>,
        #[arg(short = 'x', long, default_value_t = 0.0, allow_hyphen_values = true)]
        x: f64,
        /// Average over sites against the period-2^m limit instead.
        #[arg(short = 'm', long = "depth")]
        depth: Option<u32>,
        /// Truncation radius of the brute-force sum.
        #[arg(long, default_value_t = 64)]
        radius: u32,
    },
    /// Eigenvalues of H, written in the cache format.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Also compute and store eigenvectors.
        #[arg(long)]
        vectors: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues and the empirical IDS as CSV.
    Ids {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Localization centre, decay envelope and eigenvalue defect per site.
    Localization {
        #[command(flatten)]
        model: ModelArgs,
        /// Sites to report.
        #[arg(short = 'k', long = "site", required = true, num_args = 1.., value_delimiter = ',')]
        sites: Vec<usize>,
    },
    /// Dyadic modulus of continuity against the Lipschitz bound.
    Modulus {
        #[command(flatten)]
        model: ModelArgs,
        /// Levels as `a..b`, `a-b` or `b` (meaning 1..b); defaults to 1..m.
        #[arg(long, value_parser = parse_levels)]
        levels: Option<(u32, u32)>,
        #[arg(long, default_value_t = 8)]
        bulk_margin: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: matching, decay, landing and modulus in one JSON file.
    Report {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_levels)]
        levels: Option<(u32, u32)>,
        #[arg(long, default_value_t = 8)]
        bulk_margin: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// How a command ended, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit 1.
    Usage(String),
    /// The computation ran and the verdict is FAIL: exit 2.
    Verdict(String),
    /// Exit 3.
    Numerical(String),
}

impl From<lpdos::Error> for Failure {
    fn from(e: lpdos::Error) -> Self {
        match e {
            lpdos::Error::InvalidArgument { .. } => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(format!("i/o error: {e}"))
    }
}

pub type Outcome = Result<(), Failure>;

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Numerical(e.to_string()))?;
    }
    let cache = cli.cache.as_deref();
    match cli.command {
        Command::Sequence { depth, start, end } => commands::sequence(depth, start, end),
        Command::Distal { kmax, depth, symmetric } => commands::distal(kmax, depth, symmetric),
        Command::Landing { depth, index, periods } => commands::landing(depth, index, periods),
        Command::Lattice {
            base,
            delta,
            x,
            depth,
            radius,
        } => commands::lattice(base, delta, x, depth, radius),
        Command::Spectrum { model, vectors, out } => commands::spectrum(&model, cache, vectors, out.as_deref()),
        Command::Ids { model, out } => commands::ids(&model, cache, &out),
        Command::Localization { model, sites } => commands::localization(&model, &sites),
        Command::Modulus {
            model,
            levels,
            bulk_margin,
            out,
        } => commands::modulus(&model, cache, levels, bulk_margin, &out),
        Command::Report {
            model,
            levels,
            bulk_margin,
            out,
        } => commands::report(&model, cache, levels, bulk_margin, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verdict(msg)) => {
            eprintln!("FAIL: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

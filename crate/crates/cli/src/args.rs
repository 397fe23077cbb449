use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "kcsp", version, about = "Nogood-based k-CSP solvers, oracles and experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance file.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Solve an instance and emit statistics as JSON.
    Solve(SolveArgs),
    /// Enumerate all solutions with their isolation degrees.
    Oracle(OracleArgs),
    /// Run an exhaustive lemma verification campaign.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Tabulate characteristic roots and bound bases as CSV.
    Analyze(AnalyzeArgs),
    /// Run a seeded experiment.
    Bench {
        #[command(subcommand)]
        kind: BenchKind,
    },
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenCommon {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Uniform random nogoods.
    Uniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Model RB with d = round(n^alpha).
    ModelRb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Graph coloring from an edge list such as `1-2,2-3,1-3`.
    Coloring {
        #[arg(long, value_parser = parse_edges)]
        edges: EdgeList,
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        d: u32,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Full Latin square of the given order.
    Latin {
        #[arg(long)]
        size: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// N-queens, one variable per row.
    Nqueens {
        #[arg(long)]
        size: usize,
        #[command(flatten)]
        common: GenCommon,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Dpll,
    Ppsz,
    Brute,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub alg: Algorithm,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration budget for ppsz; defaults to the closed-form repeat count.
    #[arg(long)]
    pub max_repeats: Option<u64>,
    /// Write the statistics JSON here instead of standard output.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Include wall-clock time (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
    #[arg(long, default_value_t = kcsp_core::oracle::DEFAULT_CAP)]
    pub cap: u64,
    pub instance: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = kcsp_core::oracle::DEFAULT_CAP)]
    pub cap: u64,
    #[command(flatten)]
    pub output: Output,
    pub instance: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum VerifyKind {
    /// Narrow-choice averages against isolation degrees on every solution.
    Lemma1 {
        /// Instance files; the built-in small corpus when omitted.
        instances: Vec<PathBuf>,
        #[arg(long, default_value_t = 7)]
        max_vars: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Random nonempty point sets against the isolation-weight inequality.
    Lemma2 {
        #[arg(long = "grid-n", default_value = "2..4")]
        n: IntRange,
        #[arg(long = "grid-d", default_value = "2..4")]
        d: IntRange,
        #[arg(long, default_value_t = 1000)]
        subsets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub d: IntRange,
    #[arg(long)]
    pub k: IntRange,
    /// Exponent of the growing-domain regime d = n^alpha.
    #[arg(long, requires = "n")]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, requires = "alpha")]
    pub n: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum BenchKind {
    /// Per-iteration success rate of ppsz against its probability floor.
    Prob {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        output: Output,
        instance: PathBuf,
    },
    /// Growth of dpll node counts on the uniform family m = ratio * n.
    Growth {
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 4.0)]
        ratio: f64,
        #[arg(long = "n", default_value = "8..14")]
        n: IntRange,
        #[arg(long, default_value_t = 30)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
}

/// Inclusive integer range written `A..B` or a single `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntRange(pub RangeInclusive<u32>);

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(IntRange(lo..=hi))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList(pub Vec<(u32, u32)>);

fn parse_edges(s: &str) -> Result<EdgeList, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (u, v) = t
                .split_once('-')
                .ok_or_else(|| format!("edge `{t}` is not of the form U-V"))?;
            let u = u.trim().parse().map_err(|e| format!("`{u}`: {e}"))?;
            let v = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
            Ok((u, v))
        })
        .collect::<Result<_, _>>()
        .map(EdgeList)
}

//! `qkneser`: batch driver for the flag Kneser graph library.
//!
//! JSON goes to stdout (or `--out`), a short human summary to stderr.
//! Exit codes: 0 success, 1 usage or invalid input, 2 verification failed,
//! 3 budget exhausted under `--require-exact`, 4 runtime error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qkneser::geometry::DEFAULT_LIMIT;

#[derive(Parser, Debug)]
#[command(name = "qkneser", version, about = "Flag Kneser graphs over GF(q)")]
pub struct Cli {
    /// Enumeration guard: largest number of subspaces or flags to list.
    #[arg(long, global = true, env = "QKNESER_LIMIT", default_value_t = DEFAULT_LIMIT)]
    pub limit: usize,
    /// Worker threads; 1 gives bit-reproducible reports.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    #[arg(long)]
    pub q: u32,
    /// Flag type as vector dimensions, e.g. `2,3` or `{2,4}`.
    #[arg(long)]
    pub omega: String,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub max_nodes: u64,
    #[arg(long, default_value_t = 600.0)]
    pub max_seconds: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gaussian coefficients, theta values, flag counts and size constants.
    Counts {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// Build a graph; DIMACS to `--out` (metadata JSON to stdout) or to stdout.
    Graph {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a coloring of the line-solid or line-plane flags in dimension 5.
    Color {
        #[arg(long)]
        q: u32,
        /// covering24, line23, plane23 or mixed23.
        #[arg(long)]
        construction: String,
        /// Solid, as catalog index or subspace JSON.
        #[arg(long, default_value = "0")]
        solid: String,
        /// Line inside the solid (line23, mixed23); defaults to its first line.
        #[arg(long)]
        line: Option<String>,
        /// Plane inside the solid (plane23); omit to use a canonical setup.
        #[arg(long)]
        plane: Option<String>,
        /// Line of the plane carrying q - 1 points of W (plane23).
        #[arg(long)]
        line0: Option<String>,
        /// The q points of W (plane23), comma-separated indices.
        #[arg(long, value_delimiter = ',')]
        w: Vec<u32>,
        /// Bitmask of planes through the line using line-based classes (mixed23).
        #[arg(long, default_value_t = 0)]
        r: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fail with exit code 2 unless the coloring has this many classes.
        #[arg(long)]
        classes_expected: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build one of the four maximum EKR families of line-plane flags.
    Ekr {
        #[arg(long)]
        q: u32,
        /// F(P,l), F(P,S), F(S,tau), F(S,P) or point-line, point-solid, solid-plane, solid-point.
        #[arg(long)]
        kind: String,
        /// First parameter, as catalog index or subspace JSON.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify coloring or family documents; `-` or no file reads stdin.
    Verify { files: Vec<PathBuf> },
    /// Bound the independence number.
    Alpha {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        require_exact: bool,
    },
    /// Bound the chromatic number.
    Chi {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        require_exact: bool,
    },
    /// Search for large maximal EKR sets outside the extremal families.
    Falsify {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 10_000)]
        restarts: u64,
        #[arg(long, default_value_t = 600.0)]
        max_seconds: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the line-plane flag count identity for q = 2..=q-max.
    Identity {
        #[arg(long, default_value_t = 16)]
        q_max: u64,
    },
    /// Evaluate the heavy-solid hypotheses on a point set of PG(4,q).
    HeavySolid {
        #[arg(long)]
        q: u32,
        /// Points of M, comma-separated indices.
        #[arg(long, value_delimiter = ',')]
        points: Vec<u32>,
        /// Draw this many random points off the plane instead of `--points`.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Three non-collinear points, comma-separated indices.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u32>,
        #[arg(long, default_value_t = 5.0)]
        m: f64,
        #[arg(long, default_value_t = 9.0)]
        n: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::suites::Suite;

#[derive(Debug, Parser)]
#[command(name = "cartierkit", version, about = "Witt vectors, Cartier modules and de Rham-Witt complexes")]
pub struct Cli {
    /// Directory for cached Witt polynomials (overrides CARTIERKIT_CACHE).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Arithmetic in W_n(R).
    Witt(WittArgs),
    /// Cartier modules: tensor products, completion, homotopy of M/V.
    Cartier(CartierArgs),
    /// The de Rham-Witt complex of F_p[x_1..x_v] truncated in degree.
    Drw(DrwArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WittOp {
    Add,
    Mul,
    Frobenius,
    Verschiebung,
    Teichmuller,
    Ghost,
    Pairing,
}

#[derive(Debug, Args)]
pub struct WittArgs {
    pub op: WittOp,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub len: usize,
    /// Base ring, e.g. `F3`, `Z/9`, `F2[x]/x^5`.
    #[arg(long)]
    pub ring: String,
    /// Ring of the second operand of `pairing` (defaults to --ring).
    #[arg(long)]
    pub ring2: Option<String>,
    /// Frobenius by raising coordinates to the p-th power (R of characteristic p only).
    #[arg(long)]
    pub char_p: bool,
    /// Verschiebung W_n -> W_n, dropping the last coordinate.
    #[arg(long)]
    pub trunc: bool,
    /// Compute through the cached universal polynomials instead of ghost components.
    #[arg(long)]
    pub polys: bool,
    /// Print the full vector (p, n, ring, coords) instead of the coordinates.
    #[arg(long)]
    pub full: bool,
    /// JSON operands: coordinate arrays, or a ring element for `teichmuller`.
    #[arg(required = true, allow_negative_numbers = true)]
    pub operands: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CartierOp {
    Tensor,
    Completed,
    Completion,
    Homotopy,
    Catalog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CartierArgs {
    pub op: CartierOp,
    /// Prime for catalog lookups [default: 2].
    #[arg(long)]
    pub p: Option<u64>,
    /// Modules are `catalog:<name>`, `witt:<ring>[:<n>]`, inline JSON or `file:<path>`.
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub module: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub trunc: usize,
    #[arg(long, default_value_t = 4)]
    pub prec: usize,
    #[arg(long, default_value_t = 6)]
    pub dmax: usize,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DrwArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub wittlen: usize,
    #[arg(long, default_value_t = 1)]
    pub vars: usize,
    #[arg(long)]
    pub degcap: u32,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Print the (V + dV)-quotient of the top level in this degree.
    #[arg(long)]
    pub quotient: Option<i64>,
    /// Exponent r of the quotient by V^r + dV^r.
    #[arg(long, default_value_t = 1, requires = "quotient")]
    pub r: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Primes to test, comma separated (each case has its own default).
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<u64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report 0 ms for every case so that reports are reproducible byte for byte.
    #[arg(long)]
    pub no_timings: bool,
}

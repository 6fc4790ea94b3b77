use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "dbcover", version, about = "De Bruijn covering codes: construct, verify, analyze")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a covering code by random draw plus patching.
    Construct(ConstructArgs),
    /// Check whether a cyclic string is a covering code.
    Verify(VerifyArgs),
    /// Exact ball size and length bounds.
    Bounds(BoundsArgs),
    /// Window-overlap statistic E(T_k) and the hypothesis ratio.
    Overlap(OverlapArgs),
    /// Exhaustive search for the shortest covering string.
    Search(SearchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    #[value(alias = "permutation")]
    Perm,
    Hamming,
}

#[derive(Args, Debug, Clone)]
pub struct SpaceArgs {
    #[arg(long, value_enum)]
    pub space: SpaceArg,

    /// Alphabet size (hamming only).
    #[arg(long, default_value_t = 2)]
    pub q: u32,

    /// Window length.
    #[arg(long)]
    pub n: usize,

    /// Covering radius.
    #[arg(long = "R")]
    pub radius: usize,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub space: SpaceArgs,

    #[arg(long = "C", default_value_t = 4.0)]
    pub c: f64,

    /// RNG seed; a fresh one is generated and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, default_value_t = 8)]
    pub max_attempts: u32,

    #[arg(long, default_value_t = 2)]
    pub patch_slack: u64,

    /// Permutation mode: draw i.i.d. uniform reals instead of a shuffle of 1..=M.
    #[arg(long)]
    pub iid_reals: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub space: SpaceArgs,

    /// The string inline, e.g. `0110` or `1,3,4,5,2,6`.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub code: Option<String>,

    /// Read the string from a file (`-` for stdin).
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// List at most this many uncovered ranks.
    #[arg(long)]
    pub max_listed: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub space: SpaceArgs,

    #[arg(long = "C", default_value_t = 4.0)]
    pub c: f64,
}

#[derive(Args, Debug)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub space: SpaceArgs,

    /// Single offset; omit for the full hypothesis ratio over k = 1..n-1.
    #[arg(long)]
    pub k: Option<usize>,

    /// Enumerate every string instead of sampling.
    #[arg(long, conflicts_with = "samples")]
    pub exhaustive: bool,

    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Sweep n from --n up to this value (one CSV row per (n, R, k)).
    #[arg(long)]
    pub n_max: Option<usize>,

    /// Also report Janson inputs and bound for a random string of this length.
    #[arg(long = "janson-M")]
    pub janson_length: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub space: SpaceArgs,

    /// Largest length to try (default 16 hamming, 10 permutations).
    #[arg(long = "M-max")]
    pub max_length: Option<usize>,

    #[arg(long)]
    pub symbol_budget: Option<u32>,

    #[arg(long)]
    pub no_rotation: bool,

    #[arg(long)]
    pub no_relabel: bool,
}

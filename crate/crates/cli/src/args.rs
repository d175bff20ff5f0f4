use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};
use sqfree_ghw::exec::Execution;
use sqfree_ghw::SearchOptions;

#[derive(Parser, Debug)]
#[command(name = "cghw", version, about = "Generalized Hamming weights of square-free Cartesian evaluation codes")]
pub struct Cli {
    /// Worker threads; 0 uses one per core. Never changes the output.
    #[arg(long, global = true, env = "CGHW_JOBS", default_value_t = 0)]
    pub jobs: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Report wall time per row. Output then differs between runs.
    #[arg(long, global = true)]
    pub timings: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a code and report its length and dimension.
    Code(CodeArgs),
    /// Compute generalized Hamming weights.
    Ghw(GhwArgs),
    /// Run invariant suites over a seeded random or fixed grid.
    Verify(VerifyArgs),
    /// Sweep a (q, m, d, r) grid, one row per instance.
    Table(TableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetArg {
    Affine,
    AffinePunctured,
    Torus,
    Projective,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CodeSpec {
    /// Field size, a prime power.
    #[arg(long)]
    pub q: u64,
    /// Number of variables (for `projective`, the dimension of the projective space).
    #[arg(long)]
    pub m: Option<usize>,
    /// Degree.
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, conflicts_with = "sets")]
    pub preset: Option<PresetArg>,
    /// Factors as canonical encodings, e.g. "0,1;0,1,2".
    #[arg(long)]
    pub sets: Option<String>,
    /// All square-free monomials of degree at most d, instead of exactly d.
    #[arg(long)]
    pub leq: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Budgets {
    /// Largest number of subspaces the subspace search may enumerate.
    #[arg(long, default_value_t = sqfree_ghw::linalg::DEFAULT_SUBSPACE_CAP)]
    pub subspace_cap: u64,
    /// Node budget for the subset searches.
    #[arg(long, default_value_t = 2_000_000)]
    pub subset_budget: u64,
    /// Wall-clock limit in seconds for each search.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Allow long runs: lifts the node budget (the time limit still applies).
    #[arg(long)]
    pub extended: bool,
}

impl Budgets {
    pub fn options(&self) -> SearchOptions {
        SearchOptions {
            execution: Execution::Parallel,
            subspace_cap: self.subspace_cap,
            subset_budget: if self.extended { u64::MAX } else { self.subset_budget },
            deadline: self.time_limit.map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0))),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CodeArgs {
    #[command(flatten)]
    pub spec: CodeSpec,
    /// Include the generator matrix in the report.
    #[arg(long)]
    pub show_generator: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    ExactSubspace,
    ExactSupport,
    Footprint,
    Formula,
    Duality,
    All,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GhwArgs {
    #[command(flatten)]
    pub spec: CodeSpec,
    /// A single r, or a range such as 1..3; defaults to 1..k.
    #[arg(long)]
    pub r: Option<IntRange>,
    #[arg(long, value_enum, default_value_t = MethodArg::ExactSupport)]
    pub method: MethodArg,
    #[command(flatten)]
    pub budgets: Budgets,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Shadow,
    Bijection,
    Duality,
    Monotonicity,
    Oracles,
    Dimensions,
    Permutation,
    Sharpness,
    Nonhomogeneous,
    Tensor,
    Projective,
    All,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trials per random suite.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Field sizes for the grid suites, e.g. 2..4 or 2,3,5.
    #[arg(long, default_value = "2..3")]
    pub q: IntRange,
    /// Variable counts for the grid suites.
    #[arg(long, default_value = "2..3")]
    pub m: IntRange,
    #[command(flatten)]
    pub budgets: Budgets,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TableArgs {
    #[arg(long, default_value = "2..3")]
    pub q: IntRange,
    #[arg(long, default_value = "2..4")]
    pub m: IntRange,
    /// Degrees to include; defaults to every valid degree.
    #[arg(long)]
    pub d: Option<IntRange>,
    /// Grid to evaluate on (ignored with --projective).
    #[arg(long, value_enum, default_value_t = PresetArg::Affine)]
    pub preset: PresetArg,
    #[arg(long)]
    pub leq: bool,
    /// Sweep projective codes and compare with the punctured affine ones.
    #[arg(long)]
    pub projective: bool,
    /// Every r up to k, not only the range where the closed forms apply.
    #[arg(long)]
    pub all_r: bool,
    #[command(flatten)]
    pub budgets: Budgets,
}

/// A set of integers written `a`, `a..b` (inclusive) or `a,b,c`. May be empty (`2..1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntRange {
    text: String,
    values: Vec<usize>,
}

impl IntRange {
    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not a non-negative integer"));
        let values = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            (a..=b).collect()
        } else if s.trim().is_empty() {
            Vec::new()
        } else {
            let mut v = s.split(',').map(parse).collect::<Result<Vec<_>, _>>()?;
            v.sort_unstable();
            v.dedup();
            v
        };
        Ok(IntRange { text: s.to_string(), values })
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for IntRange {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.text)
    }
}

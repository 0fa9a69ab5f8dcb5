use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ybx_core::report::Format;
use ybx_core::scalar::Backend;

/// Trigonometric AYBE solutions from associative Belavin-Drinfeld structures.
#[derive(Debug, Parser)]
#[command(name = "ybx", version)]
pub struct Cli {
    /// Exact field: `q` for the rationals or `fp:<prime>`.
    #[arg(long, global = true, default_value = "q")]
    pub field: Backend,
    /// Evaluation points per check.
    #[arg(long, global = true, default_value_t = 10)]
    pub points: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Truncation order of Laurent expansions.
    #[arg(long, global = true, default_value_t = 4)]
    pub jet_order: usize,
    #[arg(long, global = true, default_value = "json")]
    pub format: Format,
    /// Corrupt the r-matrix before checking.
    #[arg(long, global = true, value_enum)]
    pub mutate: Option<Mutation>,
    /// Record wall-clock time per check.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mutation {
    /// add 1 to one seeded coefficient
    OneCoefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Reading {
    #[default]
    FixedU,
    FixedV,
}

/// Where a structure comes from.
#[derive(Debug, Args)]
pub struct StructureArgs {
    /// JSON file (`-` for stdin) with `n`, `c1`, `c2`, `a`.
    #[arg(long, conflicts_with_all = ["c1", "c2"])]
    pub abd: Option<PathBuf>,
    /// C₁ in 1-based cycle notation.
    #[arg(long, requires = "c2")]
    pub c1: Option<String>,
    /// C₂ in 1-based cycle notation.
    #[arg(long, requires = "c1")]
    pub c2: Option<String>,
    /// Elements of A, 1-based and comma separated.
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<usize>,
    /// Number of points; defaults to the largest point named in the cycles.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a structure's invariants, or parse a permutation.
    Validate {
        #[command(flatten)]
        structure: StructureArgs,
        /// Parse this cycle-notation permutation instead (needs --n).
        #[arg(long, conflicts_with_all = ["abd", "c1", "c2"])]
        perm: Option<String>,
    },
    /// Topology of the square-tiled surface.
    Surface {
        #[command(flatten)]
        structure: StructureArgs,
    },
    /// Evaluate r at one point.
    BuildR {
        #[command(flatten)]
        structure: StructureArgs,
        /// `q_u = e^{u/2n}`; sampled from the seed when omitted.
        #[arg(long, requires = "qv", allow_hyphen_values = true)]
        qu: Option<String>,
        #[arg(long, requires = "qu", allow_hyphen_values = true)]
        qv: Option<String>,
    },
    /// The associative Yang-Baxter equation at seeded points.
    CheckAybe {
        #[command(flatten)]
        structure: StructureArgs,
    },
    /// Skew-symmetry `r²¹(−u,−v) = −r(u,v)`.
    CheckSkew {
        #[command(flatten)]
        structure: StructureArgs,
    },
    /// Simple poles with residues `1⊗1` and `P`.
    Residues {
        #[command(flatten)]
        structure: StructureArgs,
    },
    /// The classical Yang-Baxter equation for the projected constant term.
    Cybe {
        #[command(flatten)]
        structure: StructureArgs,
    },
    /// Unitarity and the quantum Yang-Baxter equation for the rescaled R.
    Qybe {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long, value_enum, default_value_t = Reading::FixedU)]
        reading: Reading,
    },
    /// The hat involution: AYBE and skew-symmetry of hat(r), and hat∘hat = flip.
    Hat {
        #[command(flatten)]
        structure: StructureArgs,
    },
    /// Massey products of the square-tiled surface.
    Massey {
        #[command(flatten)]
        structure: StructureArgs,
        /// Seed of the evaluation point for the term table.
        #[arg(long)]
        point_seed: Option<u64>,
        /// Compare the assembled tensor with the closed form.
        #[arg(long)]
        compare: bool,
    },
    /// The area-weighted rectangle series against its closed form.
    Novikov {
        /// e.g. `1`, `1.5+2i`; runs the built-in points when omitted.
        #[arg(long, requires = "v", allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, requires = "u", allow_hyphen_values = true)]
        v: Option<String>,
        /// Truncation `L`.
        #[arg(long, default_value_t = 60)]
        terms: usize,
    },
    /// Simplicity, order and structure of a bundle on a cycle of lines.
    Bundle {
        /// Bundle JSON file (`-` for stdin).
        #[arg(long = "in")]
        input: PathBuf,
        /// Include the associated structure.
        #[arg(long)]
        emit_abd: bool,
        /// Also run AYBE, skew-symmetry and residues on its solution.
        #[arg(long)]
        check: bool,
    },
    /// Isomorphism of two structures, or the brute-force oracle on random pairs.
    AbdIso {
        #[arg(long, requires = "other")]
        abd: Option<PathBuf>,
        #[arg(long, requires = "abd")]
        other: Option<PathBuf>,
        /// Number of random pairs for the oracle comparison.
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Every check on the built-in corpus or on the given structures.
    Suite {
        /// Structure JSON files; the built-in corpus when empty.
        #[arg(long = "abd")]
        structures: Vec<PathBuf>,
        /// Largest n of the built-in corpus.
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Reading::FixedU)]
        reading: Reading,
        /// Random simple bundles pushed through the chain.
        #[arg(long, default_value_t = 10)]
        bundles: usize,
    },
}

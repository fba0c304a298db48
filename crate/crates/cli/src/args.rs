use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "qcap", version, about = "Capacity bounds for simultaneous classical-quantum transmission")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conditional entropy of a state, optionally after a channel.
    Entropy(EntropyArgs),
    /// One-shot direct and converse conditions for a code.
    Bound(BoundArgs),
    /// Vertex dumps of the one-shot or asymptotic rate regions.
    Region(RegionArgs),
    /// Monte-Carlo check of the randomized partial decoupling bound.
    Decouple(DecoupleArgs),
    /// Channel file utilities.
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChannelAction {
    /// Parse a channel file and report its properties.
    Validate {
        #[arg(long)]
        channel: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Hmin,
    Hmax,
    #[value(name = "hmin_smooth", alias = "hmin-smooth")]
    HminSmooth,
    #[value(name = "hmax_smooth", alias = "hmax-smooth")]
    HmaxSmooth,
    Vn,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::Hmin => "hmin",
            Which::Hmax => "hmax",
            Which::HminSmooth => "hmin_smooth",
            Which::HmaxSmooth => "hmax_smooth",
            Which::Vn => "vn",
        }
    }
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// State file.
    #[arg(long)]
    pub state: PathBuf,
    /// Channel applied to the state before evaluation.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub which: Which,
    /// Smoothing parameter in [0, 1) for the smooth entropies.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Comma-separated labels of the conditioned system (default: first factor).
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<String>,
    /// Comma-separated labels of the conditioning system (default: the rest).
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundMode {
    Direct,
    Converse,
    UnlimitedDirect,
    UnlimitedConverse,
}

impl BoundMode {
    pub fn name(self) -> &'static str {
        match self {
            BoundMode::Direct => "direct",
            BoundMode::Converse => "converse",
            BoundMode::UnlimitedDirect => "unlimited-direct",
            BoundMode::UnlimitedConverse => "unlimited-converse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    /// Maximally entangled state between `S_r` and the channel input.
    Phi,
    /// Uniform classical letters sent in the computational basis.
    Classical,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Source state on `Sc x Sr x A` (systems named exactly so).
    #[arg(long, conflicts_with_all = ["family", "source"])]
    pub state: Option<PathBuf>,
    /// Family member `d_c,d_r,p,theta`.
    #[arg(long, value_delimiter = ',', conflicts_with = "source")]
    pub family: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub source: Option<Source>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, value_enum)]
    pub mode: BoundMode,
    /// Rates `c,q,e` in bits per use.
    #[arg(long, value_delimiter = ',', required = true)]
    pub code: Vec<f64>,
    /// Target error in (0, 2].
    #[arg(long)]
    pub delta: f64,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Smoothing parameter of the direct conditions.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta1: Option<f64>,
    #[arg(long)]
    pub delta2: Option<f64>,
    #[arg(long)]
    pub delta_prime: Option<f64>,
    /// Slack parameter of the converse conditions, in (0, 1].
    #[arg(long, default_value_t = 1e-3)]
    pub iota: f64,
    /// Number of smoothing values tried by the automatic budget search.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionMode {
    Oneshot,
    Asymptotic,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, value_enum)]
    pub mode: RegionMode,
    /// Error of the one-shot regions, in (0, 2].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Points per family parameter.
    #[arg(long, default_value_t = 3)]
    pub grid: usize,
    /// Channel uses for the asymptotic union (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    /// Output path; `.csv` and `.json` files are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecoupleArgs {
    /// Decoupling instance file.
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eat_rates::{CompletenessModel, Variant};

use crate::config::Suite;
use crate::error::{usage, CliError};

#[derive(Debug, Parser)]
#[command(name = "chsh-rates", version, about = "Randomness rates and finite-size expansion for CHSH-based protocols")]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Existing output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize entropies over a score grid and build the convex envelopes.
    Curves(CurvesArgs),
    /// Net expansion at given round counts, or the crossover with --crossover.
    Rates(RatesArgs),
    /// Smallest round count with positive net expansion.
    Crossover(RatesArgs),
    /// Monte Carlo runs against an honest device.
    Simulate(SimulateArgs),
    /// Run an oracle suite.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curves(_) => "curves",
            Command::Rates(_) => "rates",
            Command::Crossover(_) => "crossover",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// Entropy tags (AB_00E, AB_XYE, AB_E, A_00E, A_XYE, A_E) or "all".
    #[arg(long, value_delimiter = ',')]
    pub quantity: Vec<String>,
    /// Comma-separated scores in (3/4, ½(1+1/√2)].
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// P(X=1) for product input distributions.
    #[arg(long)]
    pub zeta_a: Option<f64>,
    /// P(Y=1); defaults to --zeta-a.
    #[arg(long)]
    pub zeta_b: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolKind {
    #[value(alias = "spot_check", alias = "spot")]
    SpotCheck,
    #[value(alias = "biased_local")]
    Biased,
    #[value(alias = "recycled_input")]
    Recycled,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolKind>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub zeta_a: Option<f64>,
    /// Defaults to --zeta-a.
    #[arg(long)]
    pub zeta_b: Option<f64>,
    /// Expected CHSH score ω_exp.
    #[arg(long)]
    pub omega: Option<f64>,
}

impl ProtocolArgs {
    /// Applies the flags to the configured variant.
    pub fn variant(&self, base: Variant) -> Result<Variant, CliError> {
        let kind = self.protocol.unwrap_or(match base {
            Variant::SpotCheck { .. } => ProtocolKind::SpotCheck,
            Variant::BiasedLocal { .. } => ProtocolKind::Biased,
            Variant::RecycledInput => ProtocolKind::Recycled,
        });
        let v = match kind {
            ProtocolKind::SpotCheck => {
                let gamma = match (self.gamma, base) {
                    (Some(g), _) => g,
                    (None, Variant::SpotCheck { gamma }) => gamma,
                    _ => return Err(usage("spot-check protocol needs --gamma")),
                };
                Variant::SpotCheck { gamma }
            }
            ProtocolKind::Biased => {
                let (za, zb) = match (self.zeta_a, self.zeta_b, base) {
                    (Some(a), b, _) => (a, b.unwrap_or(a)),
                    (None, Some(b), Variant::BiasedLocal { zeta_a, .. }) => (zeta_a, b),
                    (None, None, Variant::BiasedLocal { zeta_a, zeta_b }) => (zeta_a, zeta_b),
                    _ => return Err(usage("biased protocol needs --zeta-a")),
                };
                Variant::BiasedLocal { zeta_a: za, zeta_b: zb }
            }
            ProtocolKind::Recycled => Variant::RecycledInput,
        };
        if kind != ProtocolKind::SpotCheck && self.gamma.is_some() {
            return Err(usage("--gamma only applies to the spot-check protocol"));
        }
        if kind != ProtocolKind::Biased && (self.zeta_a.is_some() || self.zeta_b.is_some()) {
            return Err(usage("--zeta-a/--zeta-b only apply to the biased protocol"));
        }
        v.validate()?;
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CompletenessArg {
    Hoeffding,
    #[value(alias = "kl")]
    RelativeEntropy,
}

impl From<CompletenessArg> for CompletenessModel {
    fn from(c: CompletenessArg) -> Self {
        match c {
            CompletenessArg::Hoeffding => CompletenessModel::Hoeffding,
            CompletenessArg::RelativeEntropy => CompletenessModel::RelativeEntropy,
        }
    }
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// Total soundness error, split as ε_EAT = ε_S, ε_h = ε_EXT = ε_S/3.
    #[arg(long)]
    pub eps_s: Option<f64>,
    /// Completeness error.
    #[arg(long)]
    pub eps_c: Option<f64>,
    /// F curve file (CSV or JSON).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Comma-separated round counts; `1e10` style is accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub n: Option<Vec<u64>>,
    #[arg(long)]
    pub crossover: bool,
    /// Optimize γ (spot-check) or ζA = ζB (biased).
    #[arg(long)]
    pub optimize_mix: bool,
    #[arg(long, value_enum)]
    pub completeness: Option<CompletenessArg>,
    /// Additive constant of the extractor loss.
    #[arg(long)]
    pub ext_constant: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Winning probabilities w00,w01,w10,w11; all equal to --omega otherwise.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    pub device: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Strategies per quantity, or restarts per score for the analytic suite.
    #[arg(long)]
    pub n: Option<usize>,
    /// Restarts per grid point when the envelope suite builds curves.
    #[arg(long)]
    pub restarts: Option<usize>,
}

/// Round counts as plain integers or exact integers in float notation.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a round count: {s}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(63) {
        Ok(x as u64)
    } else {
        Err(format!("not a nonnegative integer: {s}"))
    }
}

use std::path::{Path, PathBuf};

use curve_builder::OptimizerConfig;
use eat_rates::{ErrorBudget, SearchOptions, Variant};
use entropy_core::EntropyQuantity;
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError};

/// Everything a run reads. Loaded from JSON, then overridden by flags. The
/// resolved value is what the manifest hashes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub curves: CurvesConfig,
    pub rates: RatesConfig,
    pub simulate: SimulateConfig,
    pub verify: VerifyConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductInputs {
    pub zeta_a: f64,
    pub zeta_b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub restarts: usize,
    pub max_iters: usize,
    pub tolerance: f64,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        OptimizerSection { restarts: d.restarts, max_iters: d.max_iters, tolerance: d.tolerance }
    }
}

impl OptimizerSection {
    pub fn with_seed(&self, seed: Option<u64>) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            seed: seed.unwrap_or(OptimizerConfig::default().seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurvesConfig {
    pub quantities: Vec<EntropyQuantity>,
    /// Default grid when absent.
    pub grid: Option<Vec<f64>>,
    /// Uniform inputs when absent.
    pub pxy: Option<ProductInputs>,
    pub optimizer: OptimizerSection,
}

impl Default for CurvesConfig {
    fn default() -> Self {
        CurvesConfig { quantities: vec![EntropyQuantity::A00E], grid: None, pxy: None, optimizer: OptimizerSection::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConfig {
    pub protocol: Variant,
    pub omega_exp: Option<f64>,
    pub eps_s: f64,
    pub eps_c: f64,
    /// Explicit split; overrides `eps_s` and `eps_c`.
    pub budget: Option<ErrorBudget>,
    pub curve: Option<PathBuf>,
    pub n: Vec<u64>,
    pub crossover: bool,
    pub search: SearchOptions,
}

impl Default for RatesConfig {
    fn default() -> Self {
        RatesConfig {
            protocol: Variant::RecycledInput,
            omega_exp: None,
            eps_s: 3.09e-12,
            eps_c: 1e-6,
            budget: None,
            curve: None,
            n: Vec::new(),
            crossover: false,
            search: SearchOptions::default(),
        }
    }
}

impl RatesConfig {
    pub fn budget(&self) -> Result<ErrorBudget, CliError> {
        match self.budget {
            Some(b) => {
                b.validate()?;
                Ok(b)
            }
            None => Ok(ErrorBudget::from_soundness(self.eps_s, self.eps_c)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub protocol: Variant,
    pub omega_exp: Option<f64>,
    pub delta: Option<f64>,
    pub n: u64,
    pub trials: u64,
    /// `omega_xy[x][y]`; every entry equal to `omega_exp` when absent.
    pub device: Option<[[f64; 2]; 2]>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { protocol: Variant::RecycledInput, omega_exp: None, delta: None, n: 10_000, trials: 1000, device: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Closed-form entropies against explicit states.
    #[default]
    Oracle,
    /// Optimizer gradients against finite differences.
    Gradient,
    /// Brute-force minima of H(A|00E) against the closed form.
    Analytic,
    /// Random strategies against freshly built F curves.
    Envelope,
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub suite: Suite,
    /// Strategies per quantity (oracle, gradient, envelope) or restarts per
    /// score (analytic).
    pub count: usize,
    /// Optimizer used to build the curves of the envelope suite.
    pub optimizer: OptimizerSection,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suite: Suite::Oracle,
            count: 1000,
            optimizer: OptimizerSection { restarts: 60, ..OptimizerSection::default() },
        }
    }
}

//! CHSH score, outcome table and the six conditional entropies evaluated on
//! Bell-diagonal two-qubit strategies with rank-one projective measurements.
//!
//! All entropies are in bits.

pub mod analytic;
pub mod eigen;
pub mod formulas;
pub mod real;
pub mod types;

pub use analytic::{analytic_a_00e, analytic_g1, analytic_g2, OMEGA_CLASSICAL, OMEGA_MAX};
pub use formulas::{
    bell_spectrum, chsh_score, delta_star, entropy, epsilon_table, eve_post_measurement_state, hbin, score_bound, StrategyVars,
};
pub use types::{BellDiagonalParams, BellSpectrum, EntropyQuantity, InputDistribution, MeasurementAngles, QubitStrategy};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite value while evaluating {tag}")]
    Numeric { tag: EntropyQuantity },
}

pub type Result<T> = std::result::Result<T, EntropyError>;

//! Monte Carlo execution of the spot-checking, biased-input and
//! recycled-input protocols against honest i.i.d. devices.

pub mod device;
pub mod output;
pub mod sim;

pub use device::HonestDeviceModel;
pub use output::{summarize, trial_table_csv, SimSummary};
pub use sim::{
    empirical_completeness, estimate_score_biased, round_draws, simulate, simulate_trial, Completeness, RoundDraws, SimConfig,
    Transcript, WORDS_PER_ROUND,
};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid device: {0}")]
    Device(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Protocol(#[from] eat_rates::EatError),
    #[error("output: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, SimError>;

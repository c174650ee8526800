//! Entropy-accumulation bounds, input accounting and net expansion for the
//! spot-checking, biased-input and recycled-input CHSH protocols.

pub mod eat;
pub mod expansion;
pub mod protocol;
pub mod rate;
pub mod table;
pub mod tradeoff;

pub use eat::{eat_bound, k_alpha_scaled, second_order_v, smoothing_log_term, Profile, GRID_POINTS};
pub use expansion::{crossover_n, net_expansion, Chosen, Crossover, EatResult, SearchOptions, N_MAX};
pub use protocol::{
    completeness_error, completeness_error_with, delta_for_completeness, input_randomness, CompletenessModel, ErrorBudget,
    ProtocolSpec, Variant,
};
pub use rate::RateFunction;
pub use table::{rate_table_csv, rate_table_json, RateRow};
pub use tradeoff::{mintradeoff_biased, mintradeoff_recycled, mintradeoff_spotcheck, MinTradeoff, Outcome, Shape};

/// Lowest CHSH score reachable by a quantum strategy, ½(1 − 1/√2).
pub const S_MIN: f64 = 0.146_446_609_406_726_24;
pub use entropy_core::OMEGA_MAX as S_MAX;

#[derive(Debug, thiserror::Error)]
pub enum EatError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("curve does not match protocol: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Curve(#[from] curve_builder::CurveError),
    #[error("output: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, EatError>;

pub(crate) fn param(msg: impl Into<String>) -> EatError {
    EatError::Param(msg.into())
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa >= fb {
            hi = b;
            (b, fb) = (a, fa);
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            (a, fa) = (b, fb);
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

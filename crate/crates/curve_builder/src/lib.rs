//! Minimum conditional entropy at fixed CHSH score (G curves) and their
//! convex lower envelopes (F curves).

pub mod curve;
pub mod interp;
pub mod local;
pub mod minimize;
pub mod objective;

use entropy_core::{EntropyError, QubitStrategy};
use serde::{Deserialize, Serialize};

pub use curve::{
    build_g_curve, build_g_curve_with_stats, convex_envelope, convex_envelope_report, default_grid, export_curve, import_curve,
    read_curve, write_curve, CurveKind, Envelope, Format, RateCurve, Tangent,
};
pub use interp::Interpolant;
pub use minimize::{
    minimize_entropy_at_score, minimize_with_starts, solve_r_for_score, OptimizerConfig, RestartStats, SCORE_TOL,
};

#[derive(Debug, thiserror::Error)]
pub enum CurveError {
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("{0}")]
    Domain(String),
    #[error("no feasible restart at score {omega}")]
    Infeasible { omega: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CurveError>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub omega: f64,
    pub entropy: f64,
    pub argmin: Option<QubitStrategy>,
}

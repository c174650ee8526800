use curve_builder::CurveError;
use eat_rates::EatError;
use protocol_sim::SimError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("curve/protocol mismatch: {0}")]
    Mismatch(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Domain(_) | CurveError::Config(_) => CliError::Usage(e.to_string()),
            CurveError::Io(m) => CliError::Io(m),
            CurveError::Entropy(_) | CurveError::Infeasible { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<EatError> for CliError {
    fn from(e: EatError) -> Self {
        match e {
            EatError::Param(m) => CliError::Usage(m),
            EatError::Mismatch(m) => CliError::Mismatch(m),
            EatError::Curve(c) => c.into(),
            EatError::Output(m) => CliError::Io(m),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Device(_) | SimError::Config(_) => CliError::Usage(e.to_string()),
            SimError::Protocol(p) => p.into(),
            SimError::Output(m) => CliError::Io(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

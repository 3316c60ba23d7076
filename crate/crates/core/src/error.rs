//! Error type shared by every module, with a coarse classification used by
//! the CLI to pick exit codes (parameter errors vs numeric failures).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse failure class. Parameter errors are caller mistakes (bad input,
/// unmet precondition); numeric errors arise from the computation itself
/// (poles, singular systems, regime violations, non-convergence).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parameter,
    Numeric,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    #[error("config missing required field \"{0}\"")]
    MissingField(&'static str),

    #[error("config line {line}: unknown key \"{key}\"")]
    UnknownKey { line: usize, key: String },

    #[error("field \"{field}\": unit mismatch, expected {expected}, got \"{got}\"")]
    UnitMismatch {
        field: String,
        expected: &'static str,
        got: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("non-finite value in \"{0}\"")]
    NonFinite(&'static str),

    #[error("coupling \"{0}\" is not set; run calibrate first")]
    MissingCalibration(&'static str),

    #[error("dispersion pole: |D(omega)| = {d_abs:.3e} below floor {floor:.3e} at omega = {omega:.6e} rad/s")]
    Pole { omega: f64, d_abs: f64, floor: f64 },

    #[error("resonance denominator |Omega_c|^2 - d21*d31 too small: |den| = {0:.3e}")]
    ResonanceDenominator(f64),

    #[error("singular steady-state system (condition number {cond:.3e})")]
    SingularSystem { cond: f64 },

    #[error("kerr fit instability: residual {residual:.3e} exceeds tolerance {tol:.3e}; probe amplitudes outside the perturbative window")]
    FitInstability { residual: f64, tol: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("eigensolver failed to converge after {iters} iterations (residual trace: {trace:?})")]
    NonConvergence { iters: usize, trace: Vec<f64> },

    #[error("discretization regime: {0}")]
    DiscretizationRegime(String),

    #[error("numeric abort: non-finite field detected; last good state at t = {t_last_good:.6e} s")]
    NumericAbort { t_last_good: f64 },

    #[error("grid error: {0}")]
    Grid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            ConfigParse { .. } | MissingField(_) | UnknownKey { .. } | UnitMismatch { .. }
            | InvalidParam(_) | NonFinite(_) | MissingCalibration(_) | Grid(_) => {
                ErrorKind::Parameter
            }
            Pole { .. } | ResonanceDenominator(_) | SingularSystem { .. }
            | FitInstability { .. } | NoSolution(_) | Regime(_) | NonConvergence { .. }
            | DiscretizationRegime(_) | NumericAbort { .. } => ErrorKind::Numeric,
            Io(_) | Json(_) => ErrorKind::Io,
        }
    }

    /// CLI exit code: 2 for parameter/IO problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Parameter | ErrorKind::Io => 2,
            ErrorKind::Numeric => 3,
        }
    }
}

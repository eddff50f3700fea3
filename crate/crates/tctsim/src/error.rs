//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge after {0} sweeps/iterations")]
    ConvergenceFailure(usize),

    #[error("charge cutoff too small: level {level} has boundary weight {weight:.3e}")]
    CutoffTooSmall { level: usize, weight: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not in the dispersive regime: |eta({which})| = {eta:.4} >= 0.15")]
    NotDispersive { which: String, eta: f64 },

    #[error("transmons off resonance: shifted gaps differ by {gap_diff:.4e} GHz (> 10 G_eg = {limit:.4e})")]
    OffResonance { gap_diff: f64, limit: f64 },

    #[error("state invariant violated at t = {t_ns:.3} ns: {which}")]
    InvariantViolation { t_ns: f64, which: String },

    #[error("unknown basis label: {0}")]
    UnknownLabel(String),

    #[error("Markov condition violated: max Gamma*dt = {0:.3e} (must be < 0.01)")]
    MarkovViolation(f64),

    #[error("outcome probability underflow: N = {0:.3e}")]
    ZeroNorm(f64),

    #[error("no trajectory survived postselection to the final time")]
    EmptyEnsemble,

    #[error("norm underflow in linear postselected evolution: trace = {0:.3e}")]
    NormUnderflow(f64),

    #[error("eigendecomposition failed: {0}")]
    EigFailure(String),

    #[error("no interior gap minimum inside the bracket")]
    NoMinimum,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

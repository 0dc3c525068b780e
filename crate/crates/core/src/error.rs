use thiserror::Error;

use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("winding number could not be computed: boundary passes within {distance:e} of a root after {retries} retries")]
    RetryExhausted { retries: usize, distance: f64 },

    #[error("Newton iteration did not converge from seed {seed} (last residual {residual:e})")]
    NewtonDiverged { seed: C64, residual: f64 },

    #[error("pole set incomplete: argument principle counts {certified} roots, solver found {found}")]
    Incomplete { certified: usize, found: usize },

    #[error("normalization denominator vanishes at k = {0} (exceptional point)")]
    DegenerateNormalization(C64),

    #[error("k = {k} is within {jost:e} of a pole of the Green's function")]
    NearPole { k: C64, jost: f64 },

    #[error("quadrature failed to converge: estimated error {estimate:e} after {intervals} intervals (target {target:e})")]
    Quadrature {
        estimate: f64,
        target: f64,
        intervals: usize,
    },

    #[error("no transition between exponential and power-law regimes in [{lo}, {hi}]")]
    NoTransition { lo: f64, hi: f64 },

    #[error("pole trajectory lost at b = {b}: continuation step fell below {min_step:e}")]
    TrajectoryLost { b: f64, min_step: f64 },

    #[error("no crossing found: Im k does not change sign for family {family} on [{lo}, {hi}]")]
    NoSingularity { family: i32, lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

use thiserror::Error;

use crate::curve::LipGraph;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters (mu = {mu}, epsilon = {epsilon}): {reason}")]
    InvalidParams {
        mu: f64,
        epsilon: f64,
        reason: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation outside its parameter domain: {0}")]
    Domain(String),

    #[error("orbit escaped at step {step}")]
    Escaped { step: u64 },

    #[error("orbit is not bounded (escaped at step {step})")]
    NotBounded { step: u64 },

    #[error("no post-transient iterate landed in the window")]
    EmptyWindow,

    #[error("iterate {step} lies within tolerance of two square components")]
    AmbiguousComponent { step: usize },

    #[error("degenerate polyline input: {0}")]
    DegenerateInput(String),

    #[error("preimage did not split into exactly two graphs (found {found} branches)")]
    BranchTopology { found: usize },

    #[error("graph does not meet the critical ray L1")]
    NoL1Intersection,

    #[error("curve iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    NotConverged {
        iterations: usize,
        last_change: f64,
        last: Box<LipGraph>,
    },

    #[error("first L1 crossing is tangential at stage {stage}")]
    OrderAmbiguity { stage: usize },

    #[error("Newton iteration failed after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Newton converged to an orbit of lower period {period}")]
    ConvergedToLowerPeriod { period: usize },

    #[error("eigenvalues stayed real over the scanned range")]
    NoComplexPair,

    #[error("periodic orbit lost during continuation at mu = {mu}")]
    OrbitLost { mu: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of an iterative method, as opposed to bad input.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::NoConvergence { .. } | Error::OrbitLost { .. }
        )
    }
}

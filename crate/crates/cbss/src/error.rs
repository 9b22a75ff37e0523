use thiserror::Error;

/// Error type shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature did not reach the requested tolerance.
    #[error("quadrature failed: requested {tol:e}, achieved {achieved:e} over [{a}, {b}]")]
    Quadrature { a: f64, b: f64, tol: f64, achieved: f64 },

    /// An iterative solver ran out of iterations.
    #[error("no convergence after {iters} iterations; residual history {history:?}")]
    NonConvergence { iters: usize, history: Vec<f64> },

    /// A fixed-point iteration started diverging.
    #[error("iteration diverging: {0}")]
    Diverging(String),

    /// Input/output failure in the CLI layer.
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    /// Report serialization failure.
    #[error("serialization: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

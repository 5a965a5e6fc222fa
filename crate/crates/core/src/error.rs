//! Error type shared by every module in the crate.

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("{what} (got {value})")]
    Domain {
        /// What was required of the argument.
        what: &'static str,
        /// The offending value.
        value: f64,
    },

    /// An iterative scheme (series or continued fraction) hit its
    /// iteration cap before meeting the requested tolerance.
    #[error("{what} did not converge within {limit} iterations (x = {x})")]
    Convergence {
        what: &'static str,
        x: f64,
        limit: u32,
    },

    /// Adaptive quadrature exhausted its subdivision budget. The partial
    /// result is discarded rather than returned.
    #[error("adaptive quadrature of {what} stalled: error estimate {achieved:e} above tolerance {needed:e}")]
    QuadratureBudget {
        what: &'static str,
        achieved: f64,
        needed: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}

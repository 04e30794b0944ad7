use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator ran out of subdivisions. The partial value and
    /// its error estimate are kept so callers can decide whether to use them.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (partial result {partial:e} +/- {error:e})"
    )]
    Quadrature {
        partial: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("internal consistency check failed: {what} (relative difference {rel_diff:e} > {tolerance:e})")]
    Consistency {
        what: String,
        rel_diff: f64,
        tolerance: f64,
    },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("negative absorptive polarizability (gain medium): {0}")]
    NegativeAbsorption(String),

    #[error("limit extraction failed: residual {residual:e} above {threshold:e}")]
    Extrapolation { residual: f64, threshold: f64 },

    #[error("step rejected: {reason}; suggested dt = {suggested_dt:e}")]
    StepRejected { reason: String, suggested_dt: f64 },

    #[error("ODE step size underflow at x = {at:e}")]
    Stiffness { at: f64 },

    #[error("outside the model's regime of validity: {0}")]
    OutOfRegime(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Consistency { .. }
                | Error::Extrapolation { .. }
                | Error::StepRejected { .. }
                | Error::Stiffness { .. }
        )
    }
}

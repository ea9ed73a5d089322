use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation point sits inside the exclusion disk of a coefficient pole.
    #[error("point {at} lies within {radius} of the singular point {pole}")]
    Pole { at: f64, pole: f64, radius: f64 },

    #[error("parameter constraint violated: {0}")]
    Constraint(String),

    #[error("invalid ansatz specification: {0}")]
    InvalidSpec(String),

    #[error("Frobenius exponent-0 branch unavailable: gamma = {gamma} is a non-positive integer")]
    BranchUnavailable { gamma: f64 },

    #[error("no closed-form eigenvalue for half-integral strength {0}")]
    NoClosedForm(String),

    #[error("degeneracy not guaranteed for integer t = {0}")]
    DegeneracyNotGuaranteed(f64),

    #[error("pencil construction: {0}")]
    Construction(String),

    #[error("defective pencil: {0}")]
    DefectivePencil(String),

    #[error("verification failed [{check}]: {detail}")]
    Verification { check: String, detail: String },

    #[error("integration failed at y = {at}: {detail}")]
    Integration { at: f64, detail: String },

    #[error("spectral resolution not reached: {0}")]
    Resolution(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller supplied an out-of-range or inconsistent argument.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A parameter set violates one of the inequalities the security
    /// statements depend on. `inequality` names the violated condition.
    #[error("infeasible parameters: {inequality} violated ({detail})")]
    Feasibility { inequality: String, detail: String },

    /// Bounded-distance decoding could not certify a nearest coset element.
    #[error("outside decoding radius: {0}")]
    DecodingRadius(String),

    /// Malformed wire message or serialized object.
    #[error("malformed message: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn infeasible(inequality: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Feasibility {
            inequality: inequality.into(),
            detail: detail.into(),
        }
    }

    pub fn is_feasibility(&self) -> bool {
        matches!(self, Error::Feasibility { .. })
    }
}

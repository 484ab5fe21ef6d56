use thiserror::Error;

/// Failure of a CLI run, split by who has to act on it.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad arguments, malformed or inconsistent configuration, missing inputs.
    #[error("{0}")]
    User(String),

    /// Numerical breakdown or I/O failure.
    #[error("{0}")]
    Internal(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::User(_) => 1,
            HarnessError::Internal(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::User(_) => "user",
            HarnessError::Internal(_) => "internal",
        }
    }
}

impl From<maglab_core::Error> for HarnessError {
    fn from(e: maglab_core::Error) -> Self {
        use maglab_core::Error as E;
        match e {
            E::Config(_)
            | E::Domain(_)
            | E::OutsideRegion(_)
            | E::InsufficientRegion(_)
            | E::MemoryCap { .. }
            | E::PoleProximity { .. }
            | E::ZeroArgument
            | E::DenseCap { .. }
            | E::InvalidInput(_) => HarnessError::User(e.to_string()),
            E::Quadrature { .. } | E::NonHermitian(_) | E::NearSingular { .. } | E::NoConvergence(_) => {
                HarnessError::Internal(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Internal(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Internal(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Internal(format!("json: {e}"))
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

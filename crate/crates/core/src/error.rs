use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("zero detuning in `{field}` would divide by zero")]
    ZeroDetuning { field: String },

    #[error("balanced-field singularity: cos 2phi = 0 for species {species} (eta = 0)")]
    BalancedField { species: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular separation: {0}")]
    SingularSeparation(String),

    #[error("basis dimension {dimension} exceeds cap {cap}")]
    BasisTooLarge { dimension: u128, cap: usize },

    #[error("non-finite field value at step {step}")]
    NonFinite { step: usize },

    #[error("CFL violation: {0}")]
    Cfl(String),

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::BasisTooLarge { .. } => 2,
            Error::ZeroDetuning { .. }
            | Error::BalancedField { .. }
            | Error::Domain(_)
            | Error::SingularSeparation(_) => 3,
            Error::NonFinite { .. } | Error::Cfl(_) | Error::NoConvergence(_) => 4,
            Error::Io { .. } => 5,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}

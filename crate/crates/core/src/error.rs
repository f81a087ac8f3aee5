use thiserror::Error;

/// Errors surfaced by the placement toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("unknown VNF type {0} in request")]
    UnknownVnf(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible workload shape: {0}")]
    InfeasibleShape(String),
    #[error("quadrature error: {0}")]
    Quadrature(String),
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("VNF type {vnf} of request {request} is not assigned")]
    UnassignedVnf { request: usize, vnf: usize },
    #[error("no move available from the current placement")]
    NoMoveAvailable,
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

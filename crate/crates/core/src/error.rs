use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LowRankError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("SVD of the compressed core failed (operand ranks {ranks:?})")]
    SvdFailed { ranks: (usize, usize) },
    #[error("cannot sum an empty list of low-rank matrices")]
    EmptySum,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcmError {
    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),
    #[error("target moments are unphysical (n = {density}, T = {temperature})")]
    UnphysicalTarget { density: f64, temperature: f64 },
    #[error("singular QCM Jacobian")]
    SingularJacobian,
    #[error("Newton iteration did not converge after {iterations} iterations (|R| = {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("step damping failed to keep n_M, T_M positive")]
    DampingFailed,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    LowRank(#[from] LowRankError),
    #[error("QCM solve failed at element {element}, node {node}: {source}")]
    Qcm {
        element: usize,
        node: usize,
        #[source]
        source: QcmError,
    },
    #[error("unphysical moments at element {element}, node {node}: n = {density}, T = {temperature}")]
    Unphysical {
        element: usize,
        node: usize,
        density: f64,
        temperature: f64,
    },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

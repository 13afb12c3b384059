use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("singular argument: {0}")]
    Singular(String),
    /// A dense solve met a (numerically) singular matrix.
    #[error("singular system in {what} (pivot ratio {cond:.3e})")]
    SingularSystem { what: String, cond: f64 },
    #[error("Wood anomaly: diffraction order {order} has |beta| = {beta:.3e} below tolerance {tol:.3e}")]
    WoodAnomaly { order: i64, beta: f64, tol: f64 },
    #[error("special function evaluation failed: {0}")]
    Special(String),
}

impl Error {
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameter outside a curve's domain, degenerate tangent, coincident
    /// endpoints and similar geometric failures.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Structural mesh problems: broken loops, bad tags, inconsistent
    /// edge/element references.
    #[error("mesh error: {0}")]
    Mesh(String),

    /// A mesh-quality failure that prevents an algorithm from running
    /// (e.g. no valid star center for the interior fan rule).
    #[error("mesh quality error in element {element}: {detail}")]
    MeshQuality { element: usize, detail: String },

    /// Misuse of an operation contract (e.g. asking for the L2 projector
    /// at k = 1).
    #[error("contract misuse: {0}")]
    Contract(String),

    /// Linear-algebra failures: singular projector systems, non-positive
    /// pivots in the SPD factorization.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Bad run configuration or problem data.
    #[error("config error: {0}")]
    Config(String),

    /// File format / IO problems.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

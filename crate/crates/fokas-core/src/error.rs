use num_complex::Complex64;
use thiserror::Error;

/// Failure modes of the core library.
///
/// Variants map onto the CLI exit codes through [`Error::severity`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error in {path} at line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("origin is unclassifiable")]
    Origin,

    #[error("unbounded column requested: column {column} of {which} at lambda = {lambda}")]
    UnboundedColumn {
        which: &'static str,
        column: usize,
        lambda: Complex64,
    },

    #[error("integrator stalled at s = {at} for |lambda| = {modulus} ({detail})")]
    Stiffness {
        modulus: f64,
        at: f64,
        detail: String,
    },

    #[error("lambda = {lambda} is not on the {family} contour")]
    OffContour {
        family: &'static str,
        lambda: Complex64,
    },

    #[error("singular jump: |{culprit}| = {value:e} at lambda = {lambda}")]
    SingularJump {
        culprit: &'static str,
        value: f64,
        lambda: Complex64,
    },

    #[error("missing spectral value {name} at lambda = {lambda}")]
    MissingSpectral {
        name: &'static str,
        lambda: Complex64,
    },

    #[error("collocation matrix ill-conditioned (estimate {estimate:e})")]
    IllConditioned { estimate: f64 },

    #[error("collocation residual {residual:e} exceeds {tolerance:e}")]
    NonConvergence { residual: f64, tolerance: f64 },

    #[error("fixed-point iteration diverged after {iterations} iterations (update {update:e}); use a smaller amplitude or a denser probe grid")]
    Divergence { iterations: usize, update: f64 },

    #[error("degenerate residue: |{name}| = {value:e} at {location}")]
    DegenerateResidue {
        name: &'static str,
        value: f64,
        location: Complex64,
    },

    #[error("clustered or non-simple zeros near {near} (winding {winding})")]
    ClusteredZeros { near: Complex64, winding: i64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("step-size stability violation: {detail}; try hy <= {suggested_hy:e}")]
    Unstable { detail: String, suggested_hy: f64 },

    #[error("oracle solution left its envelope: {0}")]
    Envelope(String),
}

/// Exit-code class of an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Input,
    Numerical,
}

impl Error {
    pub fn severity(&self) -> Severity {
        match self {
            Error::Validation(_)
            | Error::Parse { .. }
            | Error::Io { .. }
            | Error::Origin
            | Error::UnboundedColumn { .. }
            | Error::OffContour { .. }
            | Error::MissingSpectral { .. }
            | Error::Unsupported(_)
            | Error::Unstable { .. } => Severity::Input,
            _ => Severity::Numerical,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

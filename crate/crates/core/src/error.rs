use crate::sparsela::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error in section {section}: {message}")]
    Parse { section: String, message: String },

    #[error("mesh integrity error: {0}")]
    Integrity(String),

    #[error("degenerate element {element}: jacobian determinant {det:e}")]
    Geometry { element: usize, det: f64 },

    #[error("unsupported quadrature degree {0} (supported: 1..=9)")]
    UnsupportedDegree(usize),

    #[error("singular matrix: zero pivot at index {pivot}")]
    Singular { pivot: usize },

    #[error("linear solve failed: {0}")]
    SolveFailed(SolveReport),

    #[error("degenerate density: {0}")]
    DegenerateDensity(String),

    #[error("property violation: {0}")]
    PropertyViolation(String),

    #[error("resource error: {0}")]
    Resource(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(section: &str, msg: impl Into<String>) -> Self {
        Error::Parse {
            section: section.to_string(),
            message: msg.into(),
        }
    }

    /// Strips any `AtStep` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn at_step(self, step: usize) -> Self {
        match self {
            e @ Error::AtStep { .. } => e,
            e => Error::AtStep {
                step,
                source: Box::new(e),
            },
        }
    }
}

use thiserror::Error;

/// Errors raised anywhere in the interpolation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KerginError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point has no coordinates")]
    EmptyPoint,

    #[error("simplex coordinates {coords:?} are outside the standard simplex")]
    OutsideSimplex { coords: Vec<f64> },

    /// The caller asked for a value at a point where the function is not
    /// defined. `distance` is the signed distance to the domain boundary
    /// (negative or zero when outside).
    #[error("domain violation at {point}: distance to boundary {distance:.3e}{}", context_suffix(.context))]
    DomainViolation {
        point: String,
        distance: f64,
        context: Option<String>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown oracle `{0}`")]
    UnknownOracle(String),

    #[error("unsupported quadrature rule: {0}")]
    UnsupportedRule(String),

    #[error("insufficient nodes: need {needed}, have {available}")]
    InsufficientNodes { needed: usize, available: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

fn context_suffix(context: &Option<String>) -> String {
    match context {
        Some(c) => format!(" ({c})"),
        None => String::new(),
    }
}

impl KerginError {
    /// Attaches a human-readable location (e.g. the offending simplex node)
    /// to a domain violation. Other variants pass through untouched.
    pub fn with_context(self, ctx: impl Into<String>) -> Self {
        match self {
            KerginError::DomainViolation {
                point,
                distance,
                context,
            } => {
                let ctx = ctx.into();
                let context = Some(match context {
                    Some(inner) => format!("{ctx}; {inner}"),
                    None => ctx,
                });
                KerginError::DomainViolation {
                    point,
                    distance,
                    context,
                }
            }
            other => other,
        }
    }

    pub fn is_domain_violation(&self) -> bool {
        matches!(self, KerginError::DomainViolation { .. })
    }
}

impl From<std::io::Error> for KerginError {
    fn from(e: std::io::Error) -> Self {
        KerginError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, KerginError>;

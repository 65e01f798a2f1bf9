use std::fmt;

/// One violated invariant, addressed by its dotted field path
/// (for example `planner.ts`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration:\n{}", format_fields(.0))]
    Validation(Vec<FieldError>),
    #[error("degenerate trajectory: {0}")]
    DegenerateTrajectory(&'static str),
    #[error("Riccati residual {residual:e} for mode {mode} exceeds {limit:e}")]
    RiccatiResidual {
        mode: &'static str,
        residual: f64,
        limit: f64,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn format_fields(fields: &[FieldError]) -> String {
    fields
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    pub fn invalid<I, P, M>(fields: I) -> Self
    where
        I: IntoIterator<Item = (P, M)>,
        P: Into<String>,
        M: Into<String>,
    {
        Error::Validation(
            fields
                .into_iter()
                .map(|(p, m)| FieldError {
                    path: p.into(),
                    message: m.into(),
                })
                .collect(),
        )
    }

    /// Field paths of a validation error; empty for other variants.
    pub fn field_paths(&self) -> Vec<&str> {
        match self {
            Error::Validation(v) => v.iter().map(|e| e.path.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

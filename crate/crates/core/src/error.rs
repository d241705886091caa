use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Pipeline stage names, used to tag errors raised while simulating a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Rasterize,
    PerturbNormals,
    PrimaryReflections,
    SecondaryReflections,
    Unify,
    Attenuation,
    Sonogram,
    Noise,
    Display,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Rasterize => "rasterize",
            Stage::PerturbNormals => "perturb-normals",
            Stage::PrimaryReflections => "primary-reflections",
            Stage::SecondaryReflections => "secondary-reflections",
            Stage::Unify => "unify",
            Stage::Attenuation => "attenuation",
            Stage::Sonogram => "sonogram",
            Stage::Noise => "noise",
            Stage::Display => "display",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum SonarError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("`{field}` out of range: {message}")]
    OutOfRange { field: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<SonarError>,
    },
}

impl SonarError {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        SonarError::InvalidParameter(message.into())
    }

    pub(crate) fn out_of_range(field: impl Into<String>, message: impl Into<String>) -> Self {
        SonarError::OutOfRange {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn mismatch(expected: impl fmt::Display, actual: impl fmt::Display) -> Self {
        SonarError::DimensionMismatch {
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SonarError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: Stage) -> Self {
        SonarError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for failures caused by bad input values rather than IO.
    pub fn is_validation(&self) -> bool {
        match self {
            SonarError::Io { .. } => false,
            SonarError::Stage { source, .. } => source.is_validation(),
            _ => true,
        }
    }
}

pub type Result<T, E = SonarError> = std::result::Result<T, E>;

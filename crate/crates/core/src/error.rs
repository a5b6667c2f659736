use std::fmt;

use thiserror::Error;

/// Pipeline stage that produced an error, used to label stage failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Layering,
    Metrics,
    Stats,
    Discretize,
    Rules,
    Eval,
    Synth,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Ingest => "ingest",
            Stage::Layering => "layering",
            Stage::Metrics => "metrics",
            Stage::Stats => "stats",
            Stage::Discretize => "discretize",
            Stage::Rules => "rules",
            Stage::Eval => "eval",
            Stage::Synth => "synth",
            Stage::Report => "report",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("duplicate class id `{0}`")]
    DuplicateClass(String),

    #[error("invalid class id `{0}`: must be non-empty, without whitespace or empty segments")]
    InvalidClassId(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("too few D-layers to form four groups (max D-layer is {0}, need at least 3)")]
    TooFewLayers(u32),

    #[error("empty input")]
    EmptyInput,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {needed} observations, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("correlation undefined: constant vector")]
    ConstantVector,

    #[error("no metric is significantly correlated with D-layer at alpha = {0}")]
    NoSignificantMetric(f64),

    #[error("no attribute survived discretization")]
    NoUsableAttribute,

    #[error("attribute `{0}` is missing from the binning scheme")]
    MissingAttribute(String),

    #[error("class `{0}` has no label")]
    MissingLabel(String),

    #[error("prediction and truth key sets differ (first mismatch: `{0}`)")]
    KeyMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn in_stage(self, stage: Stage) -> Error {
        match self {
            already @ Error::Stage { .. } => already,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code for this error: 2 parse, 3 pipeline halt, 4 I/O, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::Syntax { .. }
            | Error::Schema { .. }
            | Error::DuplicateClass(_)
            | Error::InvalidClassId(_)
            | Error::InvalidModel(_) => 2,
            Error::TooFewLayers(_) | Error::NoSignificantMetric(_) | Error::NoUsableAttribute => 3,
            Error::Io { .. } => 4,
            _ => 1,
        }
    }
}

/// Extension trait to tag a result with the stage it came from.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_categories() {
        assert_eq!(Error::DuplicateClass("a".into()).exit_code(), 2);
        assert_eq!(Error::TooFewLayers(2).exit_code(), 3);
        assert_eq!(Error::NoSignificantMetric(0.05).in_stage(Stage::Stats).exit_code(), 3);
        let io = Error::io("x", std::io::Error::new(std::io::ErrorKind::NotFound, "gone"));
        assert_eq!(io.exit_code(), 4);
        assert_eq!(Error::ConstantVector.exit_code(), 1);
    }

    #[test]
    fn stage_prefix_is_not_nested() {
        let e = Error::EmptyInput.in_stage(Stage::Stats).in_stage(Stage::Report);
        assert_eq!(e.to_string(), "stats: empty input");
    }
}

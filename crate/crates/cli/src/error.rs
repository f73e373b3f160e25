use std::fmt;

use thiserror::Error;

/// Pipeline stage an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Generate,
    Metrics,
    Mantel,
    Network,
    Heatmap,
    Transpile,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Generate => "generate",
            Stage::Metrics => "metrics",
            Stage::Mantel => "mantel",
            Stage::Network => "network",
            Stage::Heatmap => "heatmap",
            Stage::Transpile => "transpile",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Internal,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 1,
            ErrorClass::Data => 2,
            ErrorClass::Internal => 3,
        }
    }
}

#[derive(Debug, Error)]
#[error("[{stage}] {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub class: ErrorClass,
    pub message: String,
}

pub type Result<T> = std::result::Result<T, PipelineError>;

impl PipelineError {
    pub fn usage(stage: Stage, message: impl Into<String>) -> Self {
        PipelineError {
            stage,
            class: ErrorClass::Usage,
            message: message.into(),
        }
    }

    pub fn data(stage: Stage, message: impl Into<String>) -> Self {
        PipelineError {
            stage,
            class: ErrorClass::Data,
            message: message.into(),
        }
    }

    pub fn internal(stage: Stage, message: impl Into<String>) -> Self {
        PipelineError {
            stage,
            class: ErrorClass::Internal,
            message: message.into(),
        }
    }

    pub fn io(stage: Stage, path: &std::path::Path, err: std::io::Error) -> Self {
        Self::data(stage, format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        self.class.exit_code()
    }
}

/// Core errors that can only come from a bug in circuit assembly are
/// internal; everything else traces back to the input data.
pub fn classify(err: &qfnet::Error) -> ErrorClass {
    use qfnet::Error as E;
    match err {
        E::Pair { source, .. } => classify(source),
        E::InvalidWires { .. }
        | E::ParamArity { .. }
        | E::WireArity { .. }
        | E::DimensionMismatch(..)
        | E::KindMismatch { .. }
        | E::Repetitions
        | E::UnsupportedGate(_) => ErrorClass::Internal,
        _ => ErrorClass::Data,
    }
}

pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for qfnet::Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| PipelineError {
            stage,
            class: classify(&e),
            message: e.to_string(),
        })
    }
}

use std::path::PathBuf;

use perskern::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("sample {sample} ({stage}): {source}")]
    Stage {
        sample: String,
        stage: &'static str,
        #[source]
        source: Box<BenchError>,
    },
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

impl BenchError {
    /// 1 config, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 1,
            BenchError::Data(_) | BenchError::Io { .. } => 2,
            BenchError::Numerical(_) => 3,
            BenchError::Stage { source, .. } => source.exit_code(),
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> BenchError {
        let path = path.into();
        move |source| BenchError::Io { path, source }
    }

    pub fn at(self, sample: impl Into<String>, stage: &'static str) -> BenchError {
        BenchError::Stage {
            sample: sample.into(),
            stage,
            source: Box::new(self),
        }
    }
}

impl From<CoreError> for BenchError {
    fn from(e: CoreError) -> Self {
        fn numerical(e: &CoreError) -> bool {
            match e {
                CoreError::NotConverged { .. }
                | CoreError::NonFinite(_)
                | CoreError::NotSymmetric { .. } => true,
                CoreError::GramEntry { source, .. } => numerical(source),
                _ => false,
            }
        }
        if numerical(&e) {
            BenchError::Numerical(e.to_string())
        } else if matches!(e, CoreError::InvalidParameter(_)) {
            BenchError::Config(e.to_string())
        } else {
            BenchError::Data(e.to_string())
        }
    }
}

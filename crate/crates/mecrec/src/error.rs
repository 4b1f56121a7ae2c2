use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: mecrec_core::Error,
    },
    #[error("pilot grid cannot resolve the bandwidth: cut-off at |s| >= {s_cut:.4}, pilot Nyquist frequency {s_nyquist:.4}")]
    PilotTooSparse { s_cut: f64, s_nyquist: f64 },
    #[error("report schema: {0}")]
    Schema(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Stage { .. } | HarnessError::PilotTooSparse { .. } => 3,
            HarnessError::Schema(_) | HarnessError::Io { .. } => 1,
        }
    }
}

/// Tags a core error with the pipeline stage that produced it.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T, HarnessError>;
}

impl<T> StageExt<T> for mecrec_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, HarnessError> {
        self.map_err(|source| HarnessError::Stage { stage, source })
    }
}

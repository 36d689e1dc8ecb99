use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, FlockError>;

#[derive(Debug, thiserror::Error)]
pub enum FlockError {
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("initialization failed: could not place agent {agent} at least {min_spacing} m from the others after {attempts} attempts (init_box too small for n?)")]
    Init {
        agent: usize,
        attempts: usize,
        min_spacing: f64,
    },

    #[error("non-finite {quantity} for agent {agent} at step {step}")]
    NonFinite {
        quantity: &'static str,
        agent: usize,
        step: u64,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl FlockError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        FlockError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FlockError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            FlockError::Config { .. } => 2,
            FlockError::Io { .. } => 3,
            // An init failure is a property of the configuration (box too small).
            FlockError::Init { .. } => 2,
            FlockError::NonFinite { .. } => 4,
        }
    }
}

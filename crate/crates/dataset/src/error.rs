use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("netlist error in {design}: {message}")]
    Netlist { design: String, message: String },

    #[error("graphml parse error: {0}")]
    Graphml(String),

    #[error("inconsistent dataset: {0}")]
    Inconsistent(String),

    #[error("bad split: {0}")]
    BadSplit(String),

    #[error("output {0} already exists (use force to overwrite)")]
    WouldOverwrite(std::path::PathBuf),
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Model(#[from] pa_clt::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("unknown figure {0}; expected 1, 2, 3 or 4")]
    UnknownFigure(u32),
}

pub type CliResult<T> = Result<T, CliError>;

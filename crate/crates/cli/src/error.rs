use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(#[from] lightcone_core::Error),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("numerical error: {0} table cell(s) failed; see the table status column")]
    CellsFailed(usize),
}

impl CliError {
    pub fn config(field: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Config(format!("`{field}`: {reason}"))
    }

    pub fn io(context: impl std::fmt::Display, e: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {e}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::CellsFailed(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Core errors raised while building grids from validated parameters still
/// trace back to the configuration.
pub fn classify(e: lightcone_core::Error) -> CliError {
    match e {
        lightcone_core::Error::InvalidParameter { name, reason } => CliError::config(name, reason),
        other => CliError::Numerical(other),
    }
}

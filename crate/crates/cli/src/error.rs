use std::io;
use std::path::PathBuf;

use hyperlang::cfhg::CfhgError;
use hyperlang::nfh::NfhError;
use hyperlang::realize::RealizeError;
use hyperlang::text::TextError;
use thiserror::Error;

/// Exit statuses, following the BSD sysexits numbering where one exists.
pub mod code {
    pub const TRUE: u8 = 0;
    pub const FALSE: u8 = 1;
    pub const UNDECIDABLE: u8 = 2;
    pub const USAGE: u8 = 64;
    pub const DATA: u8 = 65;
    pub const IO: u8 = 74;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: TextError },
    #[error("undecidable: {0}")]
    Undecidable(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => code::USAGE,
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Data(_) => code::DATA,
            CliError::Write { .. } => code::IO,
            CliError::Undecidable(_) | CliError::Cap(_) => code::UNDECIDABLE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Parse { .. } => "parse",
            CliError::Undecidable(_) => "undecidable",
            CliError::Cap(_) => "cap-exceeded",
            CliError::Data(_) => "data",
        }
    }
}

impl From<NfhError> for CliError {
    fn from(e: NfhError) -> Self {
        match e {
            NfhError::UniverseTooLarge { .. } => CliError::Cap(e.to_string()),
            e => CliError::Data(e.to_string()),
        }
    }
}

impl From<CfhgError> for CliError {
    fn from(e: CfhgError) -> Self {
        match e {
            CfhgError::Undecidable(p) => CliError::Undecidable(p.to_string()),
            CfhgError::Nfh(e) => e.into(),
            e => CliError::Data(e.to_string()),
        }
    }
}

impl From<RealizeError> for CliError {
    fn from(e: RealizeError) -> Self {
        match e {
            RealizeError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            RealizeError::Nfh(e) => e.into(),
            e => CliError::Data(e.to_string()),
        }
    }
}

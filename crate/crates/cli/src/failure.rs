//! Error classes and their exit codes.

use std::fmt;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or config keys; exit code 2.
    Usage(String),
    /// Unreadable or inconsistent input; exit code 3.
    Input(anyhow::Error),
    /// A solver stopped short of its tolerance under `--strict`; exit code 4.
    NotConverged(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::NotConverged(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "{}", msg.trim_end()),
            Failure::Input(e) => write!(f, "error: {e:#}"),
            Failure::NotConverged(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<bintomo::Error> for Failure {
    fn from(e: bintomo::Error) -> Self {
        Failure::Input(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.into())
    }
}

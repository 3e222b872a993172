//! Error types shared across the toolkit.

use thiserror::Error;

/// Errors produced by simulation, signal processing, and model training.
#[derive(Debug, Error)]
pub enum Error {
    /// A domain object or input value violates its contract. The message
    /// names the offending field so CLI users can fix their config.
    #[error("{0}")]
    Validation(String),

    /// A configuration value is structurally valid but unusable
    /// (e.g. a filter cutoff at or above Nyquist).
    #[error("{0}")]
    Config(String),

    /// Model training could not proceed (e.g. single-class input).
    #[error("{0}")]
    Training(String),

    /// A file could not be read, written, or parsed.
    #[error("{path}: {message}")]
    File { path: String, message: String },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn training(msg: impl Into<String>) -> Self {
        Error::Training(msg.into())
    }

    pub fn file(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::File {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

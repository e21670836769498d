use thiserror::Error;

use crate::extremal::ExtremalCertificate;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed `.zom`, certificate, trace or graph text.
    #[error("format error on line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The exact search ran out of nodes. The certificate holds the best
    /// avoiding matrix seen so far and is tagged lower-bound-only.
    #[error("search budget of {budget} nodes exhausted (best lower bound {})", .best.value)]
    BudgetExhausted {
        budget: u64,
        best: Box<ExtremalCertificate>,
    },

    #[error("no sampled row has a 1-entry")]
    NoBaseRow,

    /// An upstream classification produced a trace the assembler cannot use.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

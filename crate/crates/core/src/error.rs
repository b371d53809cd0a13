use thiserror::Error;

use crate::algebras::BasisKey;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("basis key {key} is not in the domain of {algebra}")]
    KeyOutOfDomain { key: BasisKey, algebra: String },

    #[error("basis key {0} lies outside the map's input window")]
    KeyOutsideWindow(BasisKey),

    #[error("image of {key} reaches {target}, outside the output window")]
    SupportOverflow { key: BasisKey, target: BasisKey },

    #[error("window too small: no image recorded for {0}")]
    WindowTooSmall(BasisKey),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("operator {operator} is not valid on {algebra}: {reason}")]
    IncompatibleOperator {
        operator: String,
        algebra: String,
        reason: String,
    },

    #[error("operator {0} is not linear and cannot be tabulated")]
    NonLinear(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

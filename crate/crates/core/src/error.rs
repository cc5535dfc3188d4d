//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]; there are deliberately few
//! variants because almost everything that can go wrong here is either a bad
//! parameter (caught up front) or a protocol violation (stepping a mechanism
//! past its horizon or after it halted).

use std::fmt;

/// Errors reported by mechanisms, adversaries, audits and the harness.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A numeric or structural parameter is outside its documented domain.
    Parameter(String),
    /// An interaction-protocol violation: stepping a halted monitor, feeding
    /// more than `T` updates, replaying labels out of order, and so on.
    State(String),
    /// Reading or writing a stream / report file failed.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "parameter error: {msg}"),
            Error::State(msg) => write!(f, "state error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand used throughout: bail with a parameter error.
macro_rules! param_err {
    ($($arg:tt)*) => {
        return Err($crate::error::Error::Parameter(format!($($arg)*)))
    };
}

/// Shorthand used throughout: bail with a state error.
macro_rules! state_err {
    ($($arg:tt)*) => {
        return Err($crate::error::Error::State(format!($($arg)*)))
    };
}

pub(crate) use {param_err, state_err};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_includes_kind_and_message() {
        let e = Error::Parameter("eps must be positive".into());
        assert_eq!(e.to_string(), "parameter error: eps must be positive");
        let e = Error::State("monitor already halted".into());
        assert!(e.to_string().starts_with("state error:"));
        println!("[PASS] error display formats kind and message");
    }
}

//! Process exit codes.

use emorec_core::Error;
use thiserror::Error;

pub const OK: u8 = 0;
pub const INTERNAL: u8 = 1;
pub const INPUT: u8 = 2;
pub const EMPTY_PREDICTION: u8 = 3;

/// A bad flag combination or argument value caught by the CLI itself.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct InputError(pub String);

/// Maps an error chain to an exit code: the first recognised cause wins.
pub fn code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<InputError>().is_some() {
            return INPUT;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::NoTokens | Error::NoModelledTokens | Error::DegeneratePosterior => {
                    EMPTY_PREDICTION
                }
                _ => INPUT,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return INPUT;
        }
    }
    INTERNAL
}

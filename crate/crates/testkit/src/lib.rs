//! Fixtures and independent reference implementations for the test suites.
//!
//! Nothing here calls into the scoring code under test except where a
//! reference needs a trained model's stored parameters.

pub mod network;
pub mod oracle;
pub mod random;
pub mod synthetic;

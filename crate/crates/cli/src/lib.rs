//! Command-line front end and HTTP service for the emotion recommender.

pub mod args;
pub mod commands;
pub mod exit;
pub mod server;

//! Library half of the `secrelay` binary: run configuration and the
//! command implementations, kept out of `main.rs` so tests can drive them
//! against in-memory writers.

pub mod commands;
pub mod config;

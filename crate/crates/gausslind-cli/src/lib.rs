//! Configuration-driven front end for the `gausslind` library.
//!
//! A run is described by a single JSON document ([`config::ScenarioConfig`]).
//! [`scenarios::run`] evaluates it and writes one CSV file whose `#` header
//! lines carry the tool version and the SHA-256 of the canonicalised
//! configuration. [`selfcheck`] bundles the installation checks behind
//! `gausslind selfcheck`.

pub mod config;
pub mod failure;
pub mod output;
pub mod scenarios;
pub mod selfcheck;

/// Version string written into every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

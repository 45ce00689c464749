//! Gaussian states of parametric oscillators under quadratic Hamiltonians,
//! with optional linear (Caldeira–Leggett type) environment coupling.
//!
//! The crate works at the level of the 2×2 covariance block of a
//! homogeneous two-mode Gaussian state and provides
//!
//! * covariance algebra, partitions and squeezing parameters
//!   ([`symplectic_core`]),
//! * Gaussian quantum discord and related information measures
//!   ([`discord_measures`]),
//! * closed evolution through three independent engines
//!   ([`closed_dynamics`]),
//! * environment-driven evolution and Green's-function integrals
//!   ([`open_dynamics`]),
//! * the incomplete Gamma function of complex argument
//!   ([`special_functions`]),
//! * the de Sitter inflationary application ([`cosmology`]).
//!
//! All physical inputs are dimensionless ratios.

pub mod closed_dynamics;
pub mod cosmology;
pub mod discord_measures;
pub mod error;
pub mod ode;
pub mod open_dynamics;
pub mod quadrature;
pub mod special_functions;
pub mod symplectic_core;

pub use error::{Error, Result};

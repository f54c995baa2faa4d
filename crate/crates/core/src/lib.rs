//! Multiscale swarming simulator with continuous leader-follower
//! transitions.
//!
//! * [`model`]: parameters, kernel, grids and macroscopic state.
//! * [`micro`]: stochastic particle engine (binary interactions, random
//!   pairing, Bernoulli acceptance).
//! * [`hydro`]: finite-volume / semi-Lagrangian solver of the nonlocal
//!   macroscopic system.
//! * [`harness`]: scenario catalogue, micro/macro comparison, metrics and
//!   snapshot files.
//! * [`cli`]: the `flockscale` command line.

pub mod hydro;
pub mod micro;
pub mod model;
pub mod harness;
pub mod cli;

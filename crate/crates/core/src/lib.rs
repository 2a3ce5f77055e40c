//! Semiclassical Monte Carlo simulation of directed diffusion of cold atoms
//! in a symmetric lin⊥lin optical lattice driven by a zero-mean biharmonic
//! inertial force.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod drive;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod output;
pub mod units;

pub use error::{Error, Result};

//! Quantum bounce of a matter wave on a mirror in a uniform gravitational
//! field, and the resulting far-field interference pattern.
//!
//! The crate builds the energy representation of a Gaussian wave packet in
//! the Airy eigenbasis, reflects it off the mirror, propagates it to a
//! detector, compares the exact pattern with a uniform semiclassical model
//! and estimates the Fisher information on `g`.

pub mod airy;
pub mod cli;
pub mod config;
pub mod constants;
pub mod energy;
pub mod error;
pub mod fisher;
mod fourier;
pub mod propagation;
pub mod semiclassical;

pub use error::{Error, Result};

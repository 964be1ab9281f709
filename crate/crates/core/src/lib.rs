//! Numerical engine for qudit Hamiltonians, perturbative gadgets, Schrieffer-Wolff
//! effective Hamiltonians and stoquastic classification of interactions.

pub mod basis;
pub mod cli;
pub mod classify;
pub mod error;
pub mod gadgets;
pub mod interactions;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod rep;
pub mod simcert;
pub mod sparse;
pub mod suite;
pub mod spectral;
pub mod sw;

pub use error::{Error, Result};

//! Numerical toolkit for a Wiener-type boundary-continuity criterion:
//! discrete p-capacity estimation, relative capacity profiles, Wiener and
//! Ziemer integrals, constant calibration, the dyadic oscillation-decay
//! recursion, prototype Dirichlet solves, and inequality checkers, with a
//! batch CLI for reproducible experiment artifacts.

pub mod calibration;
pub mod capacity;
pub mod cli;
pub mod energy;
pub mod error;
pub mod estimates;
pub mod geometry;
pub mod minimize;
pub mod solver;
pub mod svg;
pub mod wiener;

pub use error::{Error, Result};

//! Numerical laboratory for non-smooth pseudodifferential operators.
//!
//! The crate quantizes symbols on truncated-box grids, evaluates oscillatory
//! integrals, measures Hölder–Zygmund and Bessel-potential norms, builds
//! iterated commutators, and recovers the symbol of a black-box linear
//! operator together with a symbol-class verdict.

pub mod characterize;
pub mod cli;
pub mod error;
pub mod grid;
pub mod oscint;
pub mod operators;
pub mod parse;
pub mod report;
pub mod selftest;
pub mod spaces;
pub mod symbols;

pub use error::{Error, Result};
pub use grid::{bracket, Grid, GridFunction, C64};

//! (p,q)-Bernstein operators on `[0,1]` and `[0,1]^2`.

pub mod bivariate;
pub mod cli;
pub mod convergence;
pub mod error;
pub mod expr;
pub mod korovkin;
pub mod pq_core;
pub mod report;
pub mod scalar;
pub mod schedule;
pub mod selftest;
pub mod target;
pub mod univariate;
pub mod voronovskaja;

pub use error::{Error, Result};
pub use pq_core::PQPair;
pub use scalar::{Rational, Scalar};

//! Numerical toolkit for a-priori gradient bounds of variational integrals
//! `∫ g(x, |Du|) dx` with Uhlenbeck structure.
//!
//! The crate covers integrand families with exact derivatives, a small
//! expression language, numerical checks of the structural growth
//! conditions, a Dirichlet solver on square grids, and an empirical check of
//! the resulting sup-bound on the gradient.

pub mod bound;
pub mod cli;
pub mod coefficient;
pub mod domain;
pub mod dsl;
pub mod error;
pub mod integrand;
pub mod quadrature;
pub mod solver;
pub mod structural;

pub use error::{Error, Result};

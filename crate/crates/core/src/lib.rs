//! Quadratic Dirichlet L-functions over `F_q[x]`.
//!
//! The crate computes the L-polynomials `L(u, chi_D)` exactly for every `D`
//! in the hyperelliptic ensemble `H_{2g+1}`, evaluates the predicted main
//! terms for ratios, twisted moments and the one-level density through
//! degree-grouped Euler products, and measures the empirical ensemble
//! averages they are supposed to match.

pub mod bounds;
pub mod characters;
pub mod conjecture;
pub mod ensemble;
pub mod error;
pub mod ffpoly;
pub mod lfun;
pub mod sum;

pub use error::{Error, Result};
pub use ffpoly::{FieldParams, PolyFq};

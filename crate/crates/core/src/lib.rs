//! Adaptive geometric multigrid finite element solvers built on a small
//! set of sparse matrix-vector kernels.

pub mod apps;
pub mod cli;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod solve;

pub use error::{Error, Result};

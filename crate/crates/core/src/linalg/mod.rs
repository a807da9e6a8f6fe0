//! Sparse and dense linear algebra.

pub mod backend;
pub mod csr;
pub mod dense;
pub mod diag;
pub mod vector;

pub use backend::{backend_by_name, Apply, Backend, Reference, Threaded, BACKEND_NAMES};
pub use csr::{CsrMatrix, TripletBuilder};
pub use dense::dense_lu_solve;
pub use diag::DiagOperator;
pub use vector::BlockVector;

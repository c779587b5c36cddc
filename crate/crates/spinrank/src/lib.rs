//! Exact-arithmetic toolkit for spin-model partition functions.
//!
//! A spin model is a symmetric matrix over Q(i); its partition function
//! assigns to each multigraph the exact sum, over all maps from vertices
//! to matrix indices, of the product of entry weights along edges. This
//! crate computes those values, builds finite windows of the connection
//! matrices indexed by marked graphs, works in the partition lattice
//! (zeta/Moebius matrices and their identities), and tests whether a given
//! graph invariant is consistent with being such a partition function.
//!
//! Everything is computed over the Gaussian rationals with
//! arbitrary-precision arithmetic: ranks, determinants, and identity
//! checks are exact, never approximate.

pub mod characterize;
pub mod cli;
pub mod connection;
mod dsu;
pub mod error;
pub mod io;
pub mod marked;
pub mod matrix;
pub mod multigraph;
pub mod partition;
pub mod scalar;
pub mod spin;

pub use error::{Error, Result};
pub use scalar::GaussianRational;

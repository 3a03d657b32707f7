//! Convolution lowering, structured spectral-norm bounds and norm-based
//! generalization bounds for convolutional networks.
//!
//! Convolutions are rewritten as multiplication by sparse fully connected
//! matrices `γ(W)` ([`lowering`]). Their norms are either computed exactly
//! with dense linear algebra ([`linalg`]) or bounded in closed form from the
//! small weight matrix `W` ([`bounds`]). Those norms feed the sensitive
//! complexity and Rademacher bounds ([`complexity`]) and a comparison of six
//! bound families ([`zoo`]). Networks are described by [`network`] and stored
//! as [`bundle`]s; [`verify`] checks every closed form against the oracles.

pub mod bounds;
pub mod bundle;
pub mod complexity;
pub mod error;
pub mod linalg;
pub mod lowering;
pub mod network;
pub mod rng;
pub mod verify;
pub mod zoo;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;

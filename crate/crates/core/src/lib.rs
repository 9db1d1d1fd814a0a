//! Procrustes-Wasserstein distances for Gaussian and discrete measures.
//!
//! The quotient of the Wasserstein-2 geometry by orthogonal transformations
//! and translations admits closed forms for Gaussians (Euclidean distance
//! between sorted square-root spectra) and an alternating transport/alignment
//! scheme for point clouds. This crate provides:
//!
//! - [`linalg`]: deterministic symmetric eigendecomposition, PSD square
//!   roots, polar factors, and Haar-distributed orthogonal matrices;
//! - [`gaussian`]: Bures-Wasserstein and Procrustes-Wasserstein closed forms,
//!   equivalence classes, and Gaussian Monge maps;
//! - [`ot`]: exact and entropic discrete optimal transport with squared
//!   Euclidean costs;
//! - [`align`]: the empirical Procrustes-Wasserstein solver (alternating
//!   minimization over plans and orthogonal matrices, with restarts);
//! - [`recovery`]: estimation of a latent Gaussian's orthogonal-equivalence
//!   class from observations transformed by an unknown orthogonal matrix.

pub mod align;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod ot;

pub(crate) mod seed;

pub use error::{Error, Result};
pub use linalg::{Mat, OrthogonalMatrix, SpectralDecomposition, SymmetricMatrix};

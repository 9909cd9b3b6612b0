//! Dense complex Hermitian matrix analysis at "desk scale" (n ≲ 64):
//! eigendecomposition by cyclic Jacobi rotations, functional calculus,
//! majorization orders on spectra, positive linear maps, operator means
//! (Kubo–Ando, weighted geometric, power, geodesic, Karcher), anti-norms
//! and their duals.
//!
//! Everything is deterministic: samplers take explicit seeds, quadrature
//! and iteration orders are fixed, and no platform-dependent BLAS is
//! involved — the eigensolver is a self-contained cyclic Jacobi sweep.

pub mod antinorm;
pub mod cmatrix;
pub mod eig;
mod error;
pub mod hermitian;
pub mod majorization;
pub mod matfun;
pub mod multi;
pub mod opmean;
pub mod posmap;
pub mod quad;
pub mod sample;
pub mod scalar;

pub use cmatrix::{CMatrix, C64};
pub use eig::{eigh, EigDecomposition};
pub use error::{CoreError, Result};
pub use hermitian::HermitianMatrix;
pub use majorization::MajorizationVerdict;
pub use sample::PsdSamplerConfig;

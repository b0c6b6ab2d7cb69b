//! Grids, quadrature, finite differences, symmetric eigensolvers and the
//! improper-integral probe.

pub mod eigen;
pub mod grid;
pub mod probe;
pub mod quadrature;
pub mod stencil;

pub use eigen::{dense_symmetric_eigenvalues, hermitian_eigenvalues, sym_tridiag_eigen, EigenPair};
pub use grid::{Grid, GridFunction, GridKind};
pub use probe::{improper_norm_probe, NormProbeResult, NormStatus, ProbeDomain, Sampler, Spike};
pub use quadrature::{gauss_kronrod, inner_product, norm, simpson, simpson_real};
pub use stencil::{derivative, fornberg_weights};

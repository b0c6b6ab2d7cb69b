//! Quantum operators as (expression, domain) pairs.
//!
//! An operator here is never just a differential expression. It carries the
//! subspace it acts on, and every classification (hermitian, self-adjoint,
//! deficiency indices, spectrum) is computed from both halves together.

pub mod boundary;
pub mod deficiency;
pub mod distributions;
pub mod error;
pub mod functions;
pub(crate) mod linalg;
pub mod numerics;
pub mod operator;
pub mod reports;
pub mod spectral;
pub mod uncertainty;

pub use error::{QopError, Result};
pub use num_complex::Complex64;

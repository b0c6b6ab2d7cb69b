//! Catalog of named wave functions, boundary traces and decay classification.

pub mod catalog;
pub mod decay;
pub mod trace;

pub use catalog::{
    catalog_entry, catalog_get, twisted_momentum, well_energy, AnalyticFunction, CatalogName, FunctionTrait,
    SpikeTrain, TriangleTrain,
};
pub use decay::{schwartz_probe, DecayClass, DecayReport};
pub use trace::{boundary_trace, BoundaryTrace};

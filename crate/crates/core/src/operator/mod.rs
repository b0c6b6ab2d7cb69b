//! Operators as (expression, domain) pairs and the domain algebra.

pub mod constants;
pub mod domain;
pub mod membership;
pub mod poly;
pub mod spec;

pub use constants::Constants;
pub use domain::{
    domain_of_commutator, domain_of_product, domain_of_sum, BoundaryConstraints, DecayRequirement, DomainBase,
    DomainConstraints, DomainSpec,
};
pub use membership::{apply_in_domain, domain_check, twist_of, DomainMembershipReport, Subject};
pub use poly::Poly;
pub use spec::{ImageSampler, OperatorKind, OperatorSpec};

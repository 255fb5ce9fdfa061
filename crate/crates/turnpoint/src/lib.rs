//! Uniform asymptotic solutions of `w'' - {u² f(z) + g(z)} w = p(z)` near a
//! simple turning point, with certified error bounds, Scorer functions and
//! complete inhomogeneous Airy applications.

pub mod airy;
pub mod airy_forcing;
pub mod liouville;
pub mod oracle;
pub mod particular;
pub mod quadrature;
pub mod scorer;
pub mod series;
pub mod turning_region;

pub use quadrature::Cplx;

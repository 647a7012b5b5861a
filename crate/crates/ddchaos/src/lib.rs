//! Numerical study of disjoint distributionally chaotic behavior for
//! first-order and fractional-order operator families.
//!
//! The crate computes orbits of concrete operator models, measures them in
//! Frechet or Banach seminorm families, estimates upper densities of
//! norm-threshold time sets, checks the defining operator identities by
//! quadrature, and bundles everything into runnable scenarios.

pub mod density;
pub mod detect;
pub mod element;
pub mod error;
pub mod frechet;
pub mod ml;
pub mod models;
pub(crate) mod quad;
pub mod scenario;
pub mod textio;

pub use error::{Error, Result};

// The public API traffics in Complex64; re-export the crate so callers can
// name the same version.
pub use num_complex;

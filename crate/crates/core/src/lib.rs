//! Numerical verification of the generalized Dehn twist on S² × S².
//!
//! The crate implements the twist `τ`, the circle action it is built from, the
//! homotopy `τ² ≃ id`, the loop `λ_t`, and the identification of the open
//! unit-disc bundle of T*S² with the complement of the diagonal, together with
//! a finite-difference engine that checks the claims made about them:
//! symplecticity, supports, the moment map identity, homology actions, and
//! winding numbers of normal-bundle loops along the diagonal.

pub mod chart;
pub mod checks;
pub mod compactify;
pub mod error;
pub mod geom;
pub mod interp;
pub mod maps;
pub mod quadrature;
pub mod sampling;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};

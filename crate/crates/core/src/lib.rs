//! Numerical certification of Hamiltonian stationary and Willmore-minimizing
//! Lagrangian spheres in S²(c1) × S²(c2).
//!
//! The crate is organised bottom-up:
//!
//! - [`ambient`]: metric, complex structure `J`, product structure `P` and
//!   Kähler form of the ambient product of spheres inside ℝ⁶.
//! - [`immersions`]: the closed-form family `Φ_t`, its minimal-surface
//!   inversion construction and assorted fixtures.
//! - [`calculus`]: exact 2-jets, pointwise geometry and finite differences.
//! - [`identities`]: pointwise residuals of every identity the family satisfies.
//! - [`integrals`]: quadrature on the sphere and the global invariants.
//! - [`report`]: run configuration and the JSON verification report.

pub mod ambient;
pub mod calculus;
pub mod error;
pub mod identities;
pub mod immersions;
pub mod integrals;
pub mod report;

pub use ambient::{Ambient, JOrientation, Params, ProductPoint};
pub use error::{GeomError, Result};

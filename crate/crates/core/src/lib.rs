//! Finite-element solver for the Neumann boundary value problem of the
//! biharmonic operator,
//!
//! ```text
//! Δ²u = f in D,   Δu = g on ∂D,   ∇Δu·n = h on ∂D,
//! ```
//!
//! computed as a triangular cascade of two Dirichlet Poisson problems
//! (`Δσ = f, σ = g` on ∂D, then `Δs = σ, s = 0` on ∂D), together with
//! diagnostics for the compatibility conditions, the recovered Neumann flux,
//! the weak-form residual and the overdetermined Poisson problems.
//!
//! Module map:
//! - [`mesh`]: unit square / polygonal disk triangulations, refinement, file IO
//! - [`fem`]: P1/P2 Lagrange spaces, quadrature, assembly
//! - [`sparse`]: CSR matrices and preconditioned conjugate gradients
//! - [`poisson`]: Dirichlet solves, consistent flux, overdetermined checks
//! - [`biharmonic`]: the cascade and its diagnostics
//! - [`symbolic`]: exact polynomials (harmonic basis, complementing condition)
//! - [`manufactured`]: closed-form test cases and error norms

pub mod biharmonic;
pub mod error;
pub mod fem;
pub mod manufactured;
pub mod mesh;
pub mod poisson;
pub mod sparse;
pub mod symbolic;

pub use error::{Error, Result};

//! Generalized BDF consistent splitting schemes for the incompressible
//! Navier-Stokes equations.
//!
//! * [`stencil`]: exact rational `A`, `B`, `C` stencils for order `k` and shift `beta`.
//! * [`splitting`]: the `B = eta C + D + F` split, multiplier certificates and
//!   telescoping identities.
//! * [`stability`]: characteristic roots and linear stability rasters.
//! * [`spectral`]: Legendre-Galerkin discretization on `(-1, 1)^2`.
//! * [`stepper`]: Stokes and Navier-Stokes time stepping.
//! * [`experiment`]: configuration, reproduction runs and convergence fits
//!   behind the `cssplit` binary.

pub mod error;
pub mod experiment;
pub mod linalg;
pub mod par;
pub mod problems;
pub mod roots;
pub mod spectral;
pub mod splitting;
pub mod stability;
pub mod stencil;
pub mod stepper;

pub use error::{Error, Result};

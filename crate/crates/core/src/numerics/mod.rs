//! Scalar-generic numerical kernels: adaptive quadrature, bracketed root
//! finding and an embedded Runge-Kutta integrator.

pub mod ode;
pub mod quad;
pub mod root;

pub use ode::{Integrator, OdeOptions};
pub use quad::{adaptive_simpson, QuadOptions};
pub use root::{find_root, RootOptions};

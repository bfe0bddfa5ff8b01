//! Isoperimetric profiles, convex exhaustions and comparison geometry on
//! rotationally symmetric surfaces.
//!
//! The numerical kernels and the space-form geometry are generic over the
//! scalar type ([`Real`], implemented for `f32` and `f64`); the surface
//! modules work in `f64`.

pub mod ball_placement;
pub mod error;
pub mod exhaustion;
pub mod monotone_limits;
pub mod numerics;
pub mod output;
pub mod profile;
pub mod real;
pub mod space_forms;
pub mod suite;
pub mod warped_surface;

pub use error::{Error, Result};
pub use real::Real;
pub use space_forms::SpaceForm;
pub use warped_surface::{Catalog, SymmetricRegion, WarpedSurface};

pub type SpaceForm64 = SpaceForm<f64>;
pub type SpaceForm32 = SpaceForm<f32>;
